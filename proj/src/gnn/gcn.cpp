#include "ultratag/gnn/gcn.hpp"

#include <cmath>
#include <stdexcept>

#include "ultratag/core/errors.hpp"

namespace ultratag::gnn {

GcnParams GcnParams::zeros_like() const {
  GcnParams z;
  for (const auto& w : weights) z.weights.push_back(DenseMatrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) z.biases.push_back(RowVector::Zero(b.cols()));
  return z;
}

void GcnParams::validate() const {
  if (weights.empty()) throw std::invalid_argument("GCN needs at least one layer");
  if (biases.size() != weights.size()) throw std::invalid_argument("GCN bias count != layer count");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].cols() != weights[l].cols()) throw std::invalid_argument("GCN bias width mismatch");
    if (l > 0 && weights[l].rows() != weights[l - 1].cols()) {
      throw std::invalid_argument("GCN layer " + std::to_string(l) + " input width mismatch");
    }
  }
}

bool operator==(const GcnParams& a, const GcnParams& b) {
  if (a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size()) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() || a.weights[l].cols() != b.weights[l].cols()) return false;
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

GcnParams init_gcn(const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("init_gcn: need input and output widths");
  GcnParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseMatrix w(in, out);
    for (Eigen::Index i = 0; i < in; ++i) {
      for (Eigen::Index j = 0; j < out; ++j) w(i, j) = (2.0 * rng.uniform01() - 1.0) * bound;
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(RowVector::Zero(out));
  }
  return p;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (layers == 0) throw ConfigError("layer count must be >= 1");
  if (hidden == 0) throw ConfigError("hidden width must be positive");
  if (!(sim_threshold >= 0.0 && sim_threshold < 1.0)) throw ConfigError("similarity threshold must be in [0, 1)");
  if (float_mode != "f64") throw ConfigError("float mode '" + float_mode + "' is not supported (use f64)");
}

namespace {

DenseMatrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  DenseMatrix mask(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) mask(i, j) = rng.uniform01() < p ? 0.0 : scale;
  }
  return mask;
}

}  // namespace

DenseMatrix gcn_forward(const DenseMatrix& a_hat, const DenseMatrix& features, const GcnParams& params,
                        double dropout, Rng* rng, bool train_mode, GcnTape* tape) {
  params.validate();
  if (a_hat.rows() != features.rows() || a_hat.cols() != features.rows()) {
    throw std::invalid_argument("gcn_forward: adjacency is not N x N for N feature rows");
  }
  if (static_cast<std::size_t>(features.cols()) != params.input_dim()) {
    throw std::invalid_argument("gcn_forward: feature width does not match first layer");
  }
  const bool use_dropout = train_mode && dropout > 0.0;
  if (use_dropout && rng == nullptr) throw std::invalid_argument("gcn_forward: dropout needs an rng");
  if (tape) *tape = {};

  DenseMatrix x = features;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    DenseMatrix mask;
    if (use_dropout) {
      mask = dropout_mask(x.rows(), x.cols(), dropout, *rng);
      x = x.cwiseProduct(mask);
    }
    DenseMatrix xw = x * params.weights[l];
    DenseMatrix z = a_hat * xw;
    z.rowwise() += params.biases[l];
    if (tape) {
      tape->inputs.push_back(x);
      tape->keep_masks.push_back(std::move(mask));
      tape->projected.push_back(std::move(xw));
      tape->pre_activations.push_back(z);
    }
    x = l + 1 < params.layers() ? DenseMatrix(z.cwiseMax(0.0)) : std::move(z);
  }
  return x;
}

GcnParams gcn_backward(const DenseMatrix& a_hat, const GcnParams& params, const GcnTape& tape,
                       const DenseMatrix& grad_logits, DenseMatrix* grad_a_hat) {
  GcnParams grads = params.zeros_like();
  DenseMatrix dz = grad_logits;
  for (std::size_t l = params.layers(); l-- > 0;) {
    const DenseMatrix t = a_hat.transpose() * dz;
    grads.weights[l] = tape.inputs[l].transpose() * t;
    grads.biases[l] = dz.colwise().sum();
    if (grad_a_hat) *grad_a_hat += dz * tape.projected[l].transpose();
    if (l == 0) break;
    DenseMatrix dx = t * params.weights[l].transpose();
    if (tape.keep_masks[l].size() > 0) dx = dx.cwiseProduct(tape.keep_masks[l]);
    const auto& z_prev = tape.pre_activations[l - 1];
    dz = (z_prev.array() > 0.0).select(dx, 0.0);
  }
  return grads;
}

namespace {
void check_mask(std::span<const std::optional<ClassId>> labels, std::span<const NodeId> mask,
                Eigen::Index rows, Eigen::Index cols) {
  if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
  for (NodeId i : mask) {
    if (i >= labels.size() || static_cast<Eigen::Index>(i) >= rows || !labels[i]) {
      throw std::invalid_argument("cross_entropy: node " + std::to_string(i) + " is not labeled");
    }
    if (static_cast<Eigen::Index>(*labels[i]) >= cols) throw std::invalid_argument("cross_entropy: label out of range");
  }
}
}  // namespace

double cross_entropy(const DenseMatrix& logits, std::span<const std::optional<ClassId>> labels,
                     std::span<const NodeId> mask) {
  check_mask(labels, mask, logits.rows(), logits.cols());
  double total = 0.0;
  for (NodeId i : mask) {
    const auto row = logits.row(i);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    total += lse - row(*labels[i]);
  }
  return total / static_cast<double>(mask.size());
}

LossWithGrad cross_entropy_with_grad(const DenseMatrix& logits, std::span<const std::optional<ClassId>> labels,
                                     std::span<const NodeId> mask) {
  LossWithGrad out;
  out.loss = cross_entropy(logits, labels, mask);
  out.grad_logits = DenseMatrix::Zero(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(mask.size());
  for (NodeId i : mask) {
    const auto row = logits.row(i);
    const double m = row.maxCoeff();
    RowVector p = (row.array() - m).exp();
    p /= p.sum();
    p(*labels[i]) -= 1.0;
    out.grad_logits.row(i) += p * inv;
  }
  return out;
}

void adam_step(GcnParams& params, const GcnParams& grads, AdamState& state, double lr, double weight_decay) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++state.step;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / c1;
    const auto v_hat = v.array() / c2;
    p.array() -= lr * (m_hat / (v_hat.sqrt() + kEps) + weight_decay * p.array());
  };
  for (std::size_t l = 0; l < params.layers(); ++l) {
    update(params.weights[l], grads.weights[l], state.m.weights[l], state.v.weights[l]);
    update(params.biases[l], grads.biases[l], state.m.biases[l], state.v.biases[l]);
  }
}

namespace {

std::vector<NodeId> labeled_only(std::span<const NodeId> ids, std::span<const std::optional<ClassId>> labels) {
  std::vector<NodeId> out;
  for (NodeId i : ids) {
    if (i < labels.size() && labels[i]) out.push_back(i);
  }
  return out;
}

double masked_accuracy(const std::vector<ClassId>& pred, std::span<const std::optional<ClassId>> labels,
                       const std::vector<NodeId>& mask) {
  if (mask.empty()) return 0.0;
  std::size_t correct = 0;
  for (NodeId i : mask) correct += pred[i] == *labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

std::vector<std::size_t> layer_dims(std::size_t in, std::size_t out, const TrainConfig& cfg) {
  std::vector<std::size_t> dims{in};
  for (std::size_t l = 0; l + 1 < cfg.layers; ++l) dims.push_back(cfg.hidden);
  dims.push_back(out);
  return dims;
}

}  // namespace

GcnTrainResult train_gcn(const DenseMatrix& features, const DenseMatrix& a_hat,
                         std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                         std::size_t num_classes, const TrainConfig& cfg) {
  cfg.validate();
  if (splits.train.empty()) throw std::invalid_argument("train_gcn: empty train split");
  require_finite(features, "features");

  auto init_rng = Rng::substream(cfg.seed, "gcn/init");
  auto dropout_rng = Rng::substream(cfg.seed, "gcn/dropout");
  GcnTrainResult result;
  auto& model = result.model;
  model.seed = cfg.seed;
  model.params = init_gcn(layer_dims(static_cast<std::size_t>(features.cols()), num_classes, cfg), init_rng);
  model.optimizer = AdamState::for_params(model.params);
  const auto val = labeled_only(splits.val, labels);

  GcnParams best = model.params;
  double best_val = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    GcnTape tape;
    const DenseMatrix logits = gcn_forward(a_hat, features, model.params, cfg.dropout, &dropout_rng, true, &tape);
    auto [loss, grad] = cross_entropy_with_grad(logits, labels, splits.train);
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
    const GcnParams grads = gcn_backward(a_hat, model.params, tape, grad);
    adam_step(model.params, grads, model.optimizer, cfg.learning_rate, cfg.weight_decay);

    const double val_acc = masked_accuracy(predict(model.params, features, a_hat), labels, val);
    result.history.push_back({epoch, loss, val_acc, 0.0});
    if (val.empty() || val_acc > best_val) {
      best_val = val_acc;
      best = model.params;
      model.best_epoch = epoch;
    }
  }
  model.params = std::move(best);
  return result;
}

GcnTrainResult train_gcn(const DenseMatrix& features, const EdgeSet& edges,
                         std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                         std::size_t num_classes, const TrainConfig& cfg) {
  return train_gcn(features, sym_normalize(edges, static_cast<std::size_t>(features.rows())), labels, splits,
                   num_classes, cfg);
}

GcnTrainResult train_mlp(const DenseMatrix& features, std::span<const std::optional<ClassId>> labels,
                         const SplitMasks& splits, std::size_t num_classes, const TrainConfig& cfg) {
  const DenseMatrix eye = DenseMatrix::Identity(features.rows(), features.rows());
  return train_gcn(features, eye, labels, splits, num_classes, cfg);
}

std::vector<ClassId> predict(const GcnParams& params, const DenseMatrix& features, const DenseMatrix& a_hat) {
  return argmax_rows(gcn_forward(a_hat, features, params, 0.0, nullptr, false));
}

std::vector<double> flatten(const GcnParams& p) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < p.layers(); ++l) {
    flat.insert(flat.end(), p.weights[l].data(), p.weights[l].data() + p.weights[l].size());
    flat.insert(flat.end(), p.biases[l].data(), p.biases[l].data() + p.biases[l].size());
  }
  return flat;
}

void unflatten(std::span<const double> flat, GcnParams& p) {
  std::size_t pos = 0;
  auto take = [&](double* dst, Eigen::Index n) {
    if (pos + static_cast<std::size_t>(n) > flat.size()) throw std::invalid_argument("unflatten: vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), n, dst);
    pos += static_cast<std::size_t>(n);
  };
  for (std::size_t l = 0; l < p.layers(); ++l) {
    take(p.weights[l].data(), p.weights[l].size());
    take(p.biases[l].data(), p.biases[l].size());
  }
  if (pos != flat.size()) throw std::invalid_argument("unflatten: vector too long");
}

}  // namespace ultratag::gnn
