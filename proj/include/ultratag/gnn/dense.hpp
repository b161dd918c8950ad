#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>

#include "ultratag/core/graph.hpp"

namespace ultratag {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ColVector = Eigen::VectorXd;

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, std::string_view what);

}  // namespace ultratag

namespace ultratag::gnn {

/// 0/1 symmetric adjacency matrix of an edge set.
DenseMatrix adjacency_matrix(const EdgeSet& edges, std::size_t num_nodes);

/// D^{-1/2} (W + I) D^{-1/2} with D the row sums of W + I.
/// Throws std::invalid_argument on a negative weight or non-square input.
DenseMatrix sym_normalize(const DenseMatrix& weights);
DenseMatrix sym_normalize(const EdgeSet& edges, std::size_t num_nodes);

/// Gradient of sym_normalize with respect to W, given dL/d(output).
DenseMatrix sym_normalize_backward(const DenseMatrix& weights, const DenseMatrix& grad_output);

/// Row-wise numerically stable softmax.
DenseMatrix softmax_rows(const DenseMatrix& logits);

/// Row argmax, ties to the lowest column.
std::vector<ClassId> argmax_rows(const DenseMatrix& logits);

}  // namespace ultratag::gnn
