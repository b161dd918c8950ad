#include "ultratag/structure/struct_augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <regex>
#include <stdexcept>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/parallel.hpp"

namespace ultratag::structure {

EdgeSet virtual_edges(const DenseMatrix& embeddings, std::span<const std::optional<ClassId>> soft_labels,
                      const EdgeSet& base, double tau1) {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (soft_labels.size() != n) throw std::invalid_argument("virtual_edges: soft label count != rows");

  std::map<ClassId, std::vector<NodeId>> groups;
  for (NodeId i = 0; i < n; ++i) {
    if (soft_labels[i]) groups[*soft_labels[i]].push_back(i);
  }
  std::vector<Edge> edges(base.begin(), base.end());
  for (const auto& [label, members] : groups) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      const auto ha = embeddings.row(members[a]);
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (ha.dot(embeddings.row(members[b])) > tau1) edges.push_back({members[a], members[b]});
      }
    }
  }
  return EdgeSet(std::move(edges));
}

PageRankResult pagerank(const EdgeSet& edges, std::size_t num_nodes, double damping, double tol, std::size_t max_iter) {
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("pagerank: damping must be in (0, 1)");
  PageRankResult result;
  if (num_nodes == 0) {
    result.converged = true;
    return result;
  }
  const auto adj = edges.adjacency_lists(num_nodes);
  const double n = static_cast<double>(num_nodes);
  std::vector<double> x(num_nodes, 1.0 / n);
  std::vector<double> next(num_nodes);

  for (std::size_t it = 1; it <= max_iter; ++it) {
    double dangling = 0.0;
    for (std::size_t j = 0; j < num_nodes; ++j) {
      if (adj[j].empty()) dangling += x[j];
    }
    const double base = (1.0 - damping) / n + damping * dangling / n;
    double change = 0.0;
    for (std::size_t i = 0; i < num_nodes; ++i) {
      double in = 0.0;
      for (NodeId j : adj[i]) in += x[j] / static_cast<double>(adj[j].size());
      next[i] = base + damping * in;
      change += std::abs(next[i] - x[i]);
    }
    x.swap(next);
    result.iterations = it;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(x);
  return result;
}

std::vector<NodeId> select_top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) throw std::invalid_argument("select_top_k: k out of range");
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

std::size_t selection_size(std::size_t train_count, std::size_t num_nodes, double fraction) {
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(train_count) + 1e-9));
  return std::min(std::max<std::size_t>(1, k), num_nodes);
}

std::optional<double> parse_confidence(std::string_view completion) {
  static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  const std::string text(completion);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it) {
    const std::string token = it->str();
    const char* first = token.data();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto res = std::from_chars(first, token.data() + token.size(), value);
    if (res.ec != std::errc() || !std::isfinite(value)) continue;
    if (value >= 0.0 && value <= 1.0) return value;
  }
  return std::nullopt;
}

ReconfigureResult reconfigure_edges(std::span<const NodeId> selected, const std::vector<std::string>& aggregated_texts,
                                    const std::vector<std::string>& soft_label_names, const EdgeSet& base, double tau2,
                                    llm::LlmGateway& gateway, std::string_view dataset_description) {
  if (!(tau2 >= 0.0 && tau2 <= 1.0)) throw std::invalid_argument("reconfigure_edges: tau2 must be in [0, 1]");
  std::vector<NodeId> vc(selected.begin(), selected.end());
  std::sort(vc.begin(), vc.end());
  vc.erase(std::unique(vc.begin(), vc.end()), vc.end());
  for (NodeId i : vc) {
    if (i >= aggregated_texts.size() || i >= soft_label_names.size()) {
      throw std::invalid_argument("reconfigure_edges: selected node without text");
    }
  }
  auto in_vc = [&](NodeId i) { return std::binary_search(vc.begin(), vc.end(), i); };

  std::vector<Edge> pairs;
  for (std::size_t a = 0; a < vc.size(); ++a) {
    for (std::size_t b = a + 1; b < vc.size(); ++b) pairs.push_back({vc[a], vc[b]});
  }
  std::vector<llm::RenderedPrompt> prompts;
  prompts.reserve(pairs.size());
  for (const auto& e : pairs) {
    prompts.push_back(llm::render_prompt(
        llm::PromptKind::EdgeJudge, dataset_description,
        {{aggregated_texts[e.u], aggregated_texts[e.v]}, {soft_label_names[e.u], soft_label_names[e.v]}}));
  }

  std::vector<EdgeConfidence> conf(pairs.size());
  std::vector<std::size_t> calls(pairs.size(), 0);
  parallel_for_indexed(pairs.size(), gateway.workers(), [&](std::size_t k) {
    auto parsed = parse_confidence(gateway.complete(prompts[k]));
    calls[k] = 1;
    if (!parsed) {
      parsed = parse_confidence(gateway.complete(prompts[k], {.bypass_cache = true}));
      calls[k] = 2;
    }
    if (parsed) conf[k] = {*parsed, ConfidenceSource::Llm};
    else conf[k] = {base.contains(pairs[k].u, pairs[k].v) ? 1.0 : 0.0, ConfidenceSource::Fallback};
  });

  ReconfigureResult result;
  std::vector<Edge> kept;
  for (const auto& e : base) {
    if (!(in_vc(e.u) && in_vc(e.v))) kept.push_back(e);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    result.confidences[pairs[k]] = conf[k];
    result.calls += calls[k];
    const bool keep = conf[k].source == ConfidenceSource::Llm ? conf[k].score > tau2 : conf[k].score > 0.5;
    if (conf[k].source == ConfidenceSource::Fallback) ++result.fallbacks;
    if (keep) kept.push_back(pairs[k]);
  }
  result.edges = EdgeSet(std::move(kept));
  return result;
}

}  // namespace ultratag::structure
