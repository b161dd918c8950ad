#include "ultratag/core/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "ultratag/core/errors.hpp"

namespace ultratag {

Edge Edge::make(NodeId a, NodeId b) {
  if (a == b) throw ValidationError("self-loop on node " + std::to_string(a));
  return a < b ? Edge{a, b} : Edge{b, a};
}

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  for (auto& e : edges_) e = Edge::make(e.u, e.v);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(NodeId a, NodeId b) const {
  if (a == b) return false;
  const Edge key = a < b ? Edge{a, b} : Edge{b, a};
  return std::binary_search(edges_.begin(), edges_.end(), key);
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

std::size_t EdgeSet::min_node_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : edges_) n = std::max<std::size_t>(n, e.v + 1);
  return n;
}

std::vector<std::vector<NodeId>> EdgeSet::adjacency_lists(std::size_t num_nodes) const {
  std::vector<std::vector<NodeId>> adj(num_nodes);
  for (const auto& e : edges_) {
    adj.at(e.u).push_back(e.v);
    adj.at(e.v).push_back(e.u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

void TextAttributedGraph::validate() const {
  if (texts.size() != num_nodes || labels.size() != num_nodes) {
    throw ValidationError("per-node arrays do not match num_nodes");
  }
  if (edges.min_node_count() > num_nodes) {
    throw ValidationError("dangling edge endpoint " + std::to_string(edges.min_node_count() - 1));
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (labels[i] && *labels[i] >= class_names.size()) {
      throw ValidationError("unknown class " + std::to_string(*labels[i]) + " on node " +
                            std::to_string(i));
    }
  }
  std::vector<int> owner(num_nodes, -1);
  const std::vector<NodeId>* parts[] = {&splits.train, &splits.val, &splits.test, &splits.out};
  for (int p = 0; p < 4; ++p) {
    for (NodeId id : *parts[p]) {
      if (id >= num_nodes) throw ValidationError("split references unknown node " + std::to_string(id));
      if (owner[id] != -1) throw ValidationError("splits overlap on node " + std::to_string(id));
      owner[id] = p;
    }
  }
  for (NodeId id : splits.train) {
    if (!labels[id]) throw ValidationError("training node " + std::to_string(id) + " has no label");
  }
}

std::vector<NodeId> neighbors(const TextAttributedGraph& g, NodeId node) {
  if (node >= g.num_nodes) throw std::out_of_range("node id " + std::to_string(node) + " out of range");
  std::vector<NodeId> out;
  for (const auto& e : g.edges) {
    if (e.u == node) out.push_back(e.v);
    if (e.v == node) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double accuracy(std::span<const ClassId> predictions, const TextAttributedGraph& g,
                std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  std::size_t correct = 0;
  for (NodeId id : mask) {
    if (id >= predictions.size() || id >= g.num_nodes || !g.labels[id]) {
      throw std::invalid_argument("accuracy: node " + std::to_string(id) +
                                  " lacks a label or prediction");
    }
    if (predictions[id] == *g.labels[id]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

}  // namespace ultratag
