#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ultratag {

using NodeId = std::uint32_t;
using ClassId = std::uint32_t;

/// Unordered node pair stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  /// Normalizes the order; throws ValidationError("self-loop") when a == b.
  static Edge make(NodeId a, NodeId b);

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected edge set, kept sorted and duplicate-free.
class EdgeSet {
 public:
  EdgeSet() = default;
  /// Normalizes and deduplicates; throws on self-loops.
  explicit EdgeSet(std::vector<Edge> edges);

  bool contains(NodeId a, NodeId b) const;
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  auto begin() const noexcept { return edges_.begin(); }
  auto end() const noexcept { return edges_.end(); }

  bool is_subset_of(const EdgeSet& other) const;
  /// Largest endpoint + 1, or 0 when empty.
  std::size_t min_node_count() const noexcept;

  /// Sorted neighbor lists for nodes [0, num_nodes).
  std::vector<std::vector<NodeId>> adjacency_lists(std::size_t num_nodes) const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<Edge> edges_;
};

struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::vector<NodeId> out;

  friend bool operator==(const SplitMasks&, const SplitMasks&) = default;
};

struct TextAttributedGraph {
  std::size_t num_nodes = 0;
  EdgeSet edges;
  /// nullopt = text missing (removed), distinct from an empty string.
  std::vector<std::optional<std::string>> texts;
  std::vector<std::optional<ClassId>> labels;
  std::vector<std::string> class_names;
  SplitMasks splits;

  /// Throws ValidationError describing the first violated invariant.
  void validate() const;

  std::size_t num_classes() const noexcept { return class_names.size(); }

  friend bool operator==(const TextAttributedGraph&, const TextAttributedGraph&) = default;
};

/// Sorted, deduplicated neighbors of `node`. Throws std::out_of_range.
std::vector<NodeId> neighbors(const TextAttributedGraph& g, NodeId node);

/// Fraction of `mask` nodes whose prediction equals the label.
/// Throws std::invalid_argument on an empty mask or an unlabeled masked node.
double accuracy(std::span<const ClassId> predictions, const TextAttributedGraph& g,
                std::span<const NodeId> mask);

}  // namespace ultratag
