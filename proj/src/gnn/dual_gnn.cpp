#include "ultratag/gnn/dual_gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ultratag/core/errors.hpp"

namespace ultratag::gnn {

namespace {

struct UnitRows {
  DenseMatrix unit;
  ColVector norms;
};

UnitRows normalize_rows(const DenseMatrix& h) {
  UnitRows out{h, h.rowwise().norm()};
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (out.norms(i) > 0.0) out.unit.row(i) /= out.norms(i);
    else out.unit.row(i).setZero();
  }
  return out;
}

// U U^T, exactly symmetric.
DenseMatrix gram(const DenseMatrix& unit) {
  const DenseMatrix p = unit * unit.transpose();
  return 0.5 * (p + p.transpose());
}

DenseMatrix clamp_similarity(const DenseMatrix& cosine, double threshold) {
  DenseMatrix s = (cosine.array() > threshold).select(cosine.cwiseMin(1.0), 0.0);
  s.diagonal().setZero();
  return s;
}

}  // namespace

DenseMatrix similarity_matrix(const DenseMatrix& h1, double threshold) {
  const auto rows = normalize_rows(h1);
  return clamp_similarity(gram(rows.unit), std::max(threshold, 0.0));
}

DenseMatrix fuse_mask(std::size_t num_nodes, std::span<const NodeId> selected) {
  const auto n = static_cast<Eigen::Index>(num_nodes);
  DenseMatrix mask = DenseMatrix::Ones(n, n);
  for (NodeId i : selected) {
    if (i >= num_nodes) throw std::invalid_argument("fuse_mask: selected node out of range");
    for (NodeId j : selected) mask(i, j) = 0.0;
  }
  return mask;
}

DenseMatrix fuse_adjacency(const DenseMatrix& a_star, const DenseMatrix& s, std::span<const NodeId> selected) {
  if (a_star.rows() != s.rows() || a_star.cols() != s.cols()) throw std::invalid_argument("fuse_adjacency: shape mismatch");
  return a_star + fuse_mask(static_cast<std::size_t>(a_star.rows()), selected).cwiseProduct(s);
}

DualObjective::DualObjective(DenseMatrix features, const EdgeSet& a_star, std::span<const NodeId> selected,
                             double sim_threshold)
    : features_(std::move(features)),
      a_star_(adjacency_matrix(a_star, static_cast<std::size_t>(features_.rows()))),
      a_star_norm_(sym_normalize(a_star_)),
      mask_(fuse_mask(static_cast<std::size_t>(features_.rows()), selected)),
      sim_threshold_(std::max(sim_threshold, 0.0)) {
  require_finite(features_, "features");
}

DualObjective::Forward DualObjective::forward(const GcnParams& gnn1, const GcnParams& gnn2, double dropout, Rng* rng,
                                              bool train_mode) const {
  Forward f;
  f.h1 = gcn_forward(a_star_norm_, features_, gnn1, dropout, rng, train_mode, &f.tape1);
  auto rows = normalize_rows(f.h1);
  f.unit_rows = std::move(rows.unit);
  f.row_norms = std::move(rows.norms);
  f.cosine = gram(f.unit_rows);
  f.similarity = clamp_similarity(f.cosine, sim_threshold_);
  f.fused = a_star_ + mask_.cwiseProduct(f.similarity);
  f.fused_norm = sym_normalize(f.fused);
  f.logits = gcn_forward(f.fused_norm, features_, gnn2, dropout, rng, train_mode, &f.tape2);
  return f;
}

DualObjective::Gradients DualObjective::backward(const GcnParams& gnn1, const GcnParams& gnn2, const Forward& f,
                                                 const DenseMatrix& grad_logits) const {
  Gradients g;
  DenseMatrix grad_fused_norm = DenseMatrix::Zero(f.fused_norm.rows(), f.fused_norm.cols());
  g.gnn2 = gcn_backward(f.fused_norm, gnn2, f.tape2, grad_logits, &grad_fused_norm);

  const DenseMatrix grad_fused = sym_normalize_backward(f.fused, grad_fused_norm);
  DenseMatrix grad_cos = mask_.cwiseProduct(grad_fused);
  // Clamp: gradient passes only where the cosine is kept as is; the
  // diagonal is a constant zero.
  grad_cos = (f.cosine.array() > sim_threshold_ && f.cosine.array() <= 1.0).select(grad_cos, 0.0);
  grad_cos.diagonal().setZero();

  // cosine = U U^T  =>  dU = (G + G^T) U
  const DenseMatrix grad_unit = (grad_cos + grad_cos.transpose()) * f.unit_rows;
  DenseMatrix grad_h1 = DenseMatrix::Zero(f.h1.rows(), f.h1.cols());
  for (Eigen::Index i = 0; i < f.h1.rows(); ++i) {
    const double n = f.row_norms(i);
    if (n <= 0.0) continue;
    const auto u = f.unit_rows.row(i);
    const auto gu = grad_unit.row(i);
    grad_h1.row(i) = (gu - u * gu.dot(u)) / n;
  }
  g.gnn1 = gcn_backward(a_star_norm_, gnn1, f.tape1, grad_h1);
  return g;
}

namespace {

double max_abs(const GcnParams& p) {
  double m = 0.0;
  for (const auto& w : p.weights) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : p.biases) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

std::vector<std::size_t> dims(std::size_t in, std::size_t out, const TrainConfig& cfg) {
  std::vector<std::size_t> d{in};
  for (std::size_t l = 0; l + 1 < cfg.layers; ++l) d.push_back(cfg.hidden);
  d.push_back(out);
  return d;
}

}  // namespace

DualTrainResult train_dual(const DenseMatrix& features, const EdgeSet& a_star, std::span<const NodeId> selected,
                           std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                           std::size_t num_classes, const TrainConfig& cfg) {
  cfg.validate();
  if (splits.train.empty()) throw std::invalid_argument("train_dual: empty train split");
  const DualObjective objective(features, a_star, selected, cfg.sim_threshold);
  const auto width = static_cast<std::size_t>(features.cols());

  auto init1 = Rng::substream(cfg.seed, "dual/gnn1/init");
  auto init2 = Rng::substream(cfg.seed, "dual/gnn2/init");
  auto dropout_rng = Rng::substream(cfg.seed, "dual/dropout");

  DualTrainResult result;
  auto& m = result.model;
  m.seed = cfg.seed;
  m.gnn1 = init_gcn(dims(width, width, cfg), init1);
  m.gnn2 = init_gcn(dims(width, num_classes, cfg), init2);
  m.opt1 = AdamState::for_params(m.gnn1);
  m.opt2 = AdamState::for_params(m.gnn2);

  std::vector<NodeId> val;
  for (NodeId i : splits.val) {
    if (i < labels.size() && labels[i]) val.push_back(i);
  }

  GcnParams best1 = m.gnn1;
  GcnParams best2 = m.gnn2;
  double best_val = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto fwd = objective.forward(m.gnn1, m.gnn2, cfg.dropout, &dropout_rng, true);
    auto [loss, grad] = cross_entropy_with_grad(fwd.logits, labels, splits.train);
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
    const auto grads = objective.backward(m.gnn1, m.gnn2, fwd, grad);
    adam_step(m.gnn1, grads.gnn1, m.opt1, cfg.learning_rate, cfg.weight_decay);
    adam_step(m.gnn2, grads.gnn2, m.opt2, cfg.learning_rate, cfg.weight_decay);
    m.epoch = epoch;

    double val_acc = 0.0;
    if (!val.empty()) {
      const auto pred = predict(m, objective);
      std::size_t correct = 0;
      for (NodeId i : val) correct += pred[i] == *labels[i] ? 1 : 0;
      val_acc = static_cast<double>(correct) / static_cast<double>(val.size());
    }
    result.history.push_back({epoch, loss, val_acc, max_abs(grads.gnn1)});
    if (val.empty() || val_acc > best_val) {
      best_val = val_acc;
      best1 = m.gnn1;
      best2 = m.gnn2;
      m.best_epoch = epoch;
    }
  }
  m.gnn1 = std::move(best1);
  m.gnn2 = std::move(best2);
  return result;
}

std::vector<ClassId> predict(const DualGnnModel& model, const DualObjective& objective) {
  return argmax_rows(objective.forward(model.gnn1, model.gnn2, 0.0, nullptr, false).logits);
}

}  // namespace ultratag::gnn
