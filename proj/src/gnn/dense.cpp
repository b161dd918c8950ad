#include "ultratag/gnn/dense.hpp"

#include <stdexcept>
#include <string>

#include "ultratag/core/errors.hpp"

namespace ultratag {

void require_finite(const DenseMatrix& m, std::string_view what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + " contains NaN or Inf");
}

}  // namespace ultratag

namespace ultratag::gnn {

DenseMatrix adjacency_matrix(const EdgeSet& edges, std::size_t num_nodes) {
  const auto n = static_cast<Eigen::Index>(num_nodes);
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (const auto& e : edges) {
    if (e.v >= num_nodes) throw std::invalid_argument("adjacency_matrix: edge endpoint out of range");
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

namespace {
ColVector inv_sqrt_degrees(const DenseMatrix& weights) {
  return (weights.rowwise().sum().array() + 1.0).rsqrt().matrix();
}
}  // namespace

DenseMatrix sym_normalize(const DenseMatrix& weights) {
  if (weights.rows() != weights.cols()) throw std::invalid_argument("sym_normalize: matrix must be square");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("sym_normalize: negative weight");
  const ColVector s = inv_sqrt_degrees(weights);
  DenseMatrix out = weights;
  out.diagonal().array() += 1.0;
  return s.asDiagonal() * out * s.asDiagonal();
}

DenseMatrix sym_normalize(const EdgeSet& edges, std::size_t num_nodes) {
  return sym_normalize(adjacency_matrix(edges, num_nodes));
}

DenseMatrix sym_normalize_backward(const DenseMatrix& weights, const DenseMatrix& grad_output) {
  // out_ij = B_ij s_i s_j, B = W + I, s_i = d_i^{-1/2}, d_i = sum_j B_ij.
  const ColVector s = inv_sqrt_degrees(weights);
  DenseMatrix b = weights;
  b.diagonal().array() += 1.0;
  const DenseMatrix q = grad_output.cwiseProduct(b);
  const ColVector grad_s = q * s + q.transpose() * s;
  const ColVector grad_d = (-0.5 * s.array().cube() * grad_s.array()).matrix();
  DenseMatrix grad_w = s.asDiagonal() * grad_output * s.asDiagonal();
  grad_w.colwise() += grad_d;
  return grad_w;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
  DenseMatrix p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double m = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

std::vector<ClassId> argmax_rows(const DenseMatrix& logits) {
  std::vector<ClassId> out(static_cast<std::size_t>(logits.rows()), 0);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < logits.cols(); ++k) {
      if (logits(i, k) > logits(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
  }
  return out;
}

}  // namespace ultratag::gnn
