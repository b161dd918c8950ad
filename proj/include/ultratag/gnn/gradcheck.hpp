#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ultratag/core/graph.hpp"
#include "ultratag/gnn/dense.hpp"

namespace ultratag::gnn {

/// Central differences (f(x + e_i eps) - f(x - e_i eps)) / 2 eps per coordinate.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double> x, double epsilon = 1e-5);

/// Coordinates where both gradients are below this are compared absolutely.
inline constexpr double kGradRelativeFloor = 1e-6;

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, kGradRelativeFloor)
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// Small labeled graph used by the gradient checks: two planted blocks,
/// random features, a few selected nodes.
struct GradcheckFixture {
  DenseMatrix features;
  EdgeSet edges;
  std::vector<NodeId> selected;
  std::vector<std::optional<ClassId>> labels;
  std::vector<NodeId> train;
  std::size_t num_classes = 2;
};

GradcheckFixture make_gradcheck_fixture(std::size_t num_nodes = 12, std::size_t feature_dim = 6,
                                        std::uint64_t seed = 7);

struct GradcheckResult {
  std::string name;
  std::size_t parameters = 0;
  double max_rel_error = 0.0;
  double seconds = 0.0;
};

/// Reverse-mode vs central differences for the plain-GCN loss and the joint
/// dual-GNN loss on the fixture (dropout off). Hidden width is kept small
/// so the numeric side stays fast.
std::vector<GradcheckResult> run_gradcheck_suite(const GradcheckFixture& fixture, std::size_t hidden = 8,
                                                 double epsilon = 1e-5, std::uint64_t seed = 11);

}  // namespace ultratag::gnn
