#include "ultratag/gnn/gradcheck.hpp"

#include <chrono>
#include <cmath>

#include "ultratag/core/rng.hpp"
#include "ultratag/gnn/dual_gnn.hpp"
#include "ultratag/gnn/gcn.hpp"

namespace ultratag::gnn {

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double> x, double epsilon) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + epsilon;
    const double up = f(x);
    x[i] = orig - epsilon;
    const double down = f(x);
    x[i] = orig;
    grad[i] = (up - down) / (2.0 * epsilon);
  }
  return grad;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size() && i < numeric.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), kGradRelativeFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return analytic.size() == numeric.size() ? worst : INFINITY;
}

GradcheckFixture make_gradcheck_fixture(std::size_t num_nodes, std::size_t feature_dim, std::uint64_t seed) {
  GradcheckFixture fx;
  auto rng = Rng::substream(seed, "gradcheck/fixture");
  const auto n = static_cast<Eigen::Index>(num_nodes);
  const auto d = static_cast<Eigen::Index>(feature_dim);
  fx.features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double shift = i < n / 2 ? 0.5 : -0.5;
    for (Eigen::Index j = 0; j < d; ++j) fx.features(i, j) = rng.uniform01() - 0.5 + (j % 2 == 0 ? shift : 0.0);
  }
  std::vector<Edge> edges;
  for (NodeId i = 0; i < num_nodes; ++i) {
    for (NodeId j = i + 1; j < num_nodes; ++j) {
      const bool same = (i < num_nodes / 2) == (j < num_nodes / 2);
      if (rng.bernoulli(same ? 0.45 : 0.08)) edges.push_back({i, j});
    }
  }
  fx.edges = EdgeSet(std::move(edges));
  fx.labels.resize(num_nodes);
  for (NodeId i = 0; i < num_nodes; ++i) {
    fx.labels[i] = i < num_nodes / 2 ? 0u : 1u;
    if (i % 3 != 2) fx.train.push_back(i);
  }
  fx.selected = {0, 1, static_cast<NodeId>(num_nodes - 1)};
  return fx;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck_suite(const GradcheckFixture& fx, std::size_t hidden, double epsilon,
                                                 std::uint64_t seed) {
  std::vector<GradcheckResult> results;
  const auto d = static_cast<std::size_t>(fx.features.cols());
  const auto n = static_cast<std::size_t>(fx.features.rows());

  {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = Rng::substream(seed, "gradcheck/gcn");
    GcnParams params = init_gcn({d, hidden, fx.num_classes}, rng);
    for (auto& b : params.biases) b.setConstant(0.05);
    const DenseMatrix a_hat = sym_normalize(fx.edges, n);

    GcnTape tape;
    const DenseMatrix logits = gcn_forward(a_hat, fx.features, params, 0.0, nullptr, true, &tape);
    const auto lg = cross_entropy_with_grad(logits, fx.labels, fx.train);
    const auto analytic = flatten(gcn_backward(a_hat, params, tape, lg.grad_logits));

    auto loss = [&](std::span<const double> flat) {
      GcnParams p = params;
      unflatten(flat, p);
      return cross_entropy(gcn_forward(a_hat, fx.features, p, 0.0, nullptr, false), fx.labels, fx.train);
    };
    const auto numeric = finite_diff_grad(loss, flatten(params), epsilon);
    results.push_back({"plain-gcn", analytic.size(), max_relative_error(analytic, numeric), seconds_since(t0)});
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = Rng::substream(seed, "gradcheck/dual");
    GcnParams gnn1 = init_gcn({d, hidden, d}, rng);
    GcnParams gnn2 = init_gcn({d, hidden, fx.num_classes}, rng);
    for (auto& b : gnn2.biases) b.setConstant(0.05);
    const DualObjective objective(fx.features, fx.edges, fx.selected);

    const auto fwd = objective.forward(gnn1, gnn2, 0.0, nullptr, true);
    const auto lg = cross_entropy_with_grad(fwd.logits, fx.labels, fx.train);
    const auto grads = objective.backward(gnn1, gnn2, fwd, lg.grad_logits);
    auto analytic = flatten(grads.gnn1);
    const auto analytic2 = flatten(grads.gnn2);
    analytic.insert(analytic.end(), analytic2.begin(), analytic2.end());

    const std::size_t split = flatten(gnn1).size();
    auto loss = [&](std::span<const double> flat) {
      GcnParams p1 = gnn1;
      GcnParams p2 = gnn2;
      unflatten(flat.first(split), p1);
      unflatten(flat.subspan(split), p2);
      return cross_entropy(objective.forward(p1, p2, 0.0, nullptr, false).logits, fx.labels, fx.train);
    };
    auto x = flatten(gnn1);
    const auto x2 = flatten(gnn2);
    x.insert(x.end(), x2.begin(), x2.end());
    const auto numeric = finite_diff_grad(loss, x, epsilon);
    results.push_back({"dual-gnn", analytic.size(), max_relative_error(analytic, numeric), seconds_since(t0)});

    const auto numeric1 = std::vector<double>(numeric.begin(), numeric.begin() + static_cast<std::ptrdiff_t>(split));
    const auto analytic1 = std::vector<double>(analytic.begin(), analytic.begin() + static_cast<std::ptrdiff_t>(split));
    results.push_back({"dual-gnn/gnn1-via-similarity", analytic1.size(), max_relative_error(analytic1, numeric1), 0.0});
  }
  return results;
}

}  // namespace ultratag::gnn
