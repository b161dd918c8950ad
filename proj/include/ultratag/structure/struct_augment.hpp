#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ultratag/core/graph.hpp"
#include "ultratag/gnn/dense.hpp"
#include "ultratag/llm/gateway.hpp"

namespace ultratag::structure {

enum class ConfidenceSource { Llm, Fallback };

struct EdgeConfidence {
  double score = 0.0;  ///< in [0, 1]
  ConfidenceSource source = ConfidenceSource::Llm;

  friend bool operator==(const EdgeConfidence&, const EdgeConfidence&) = default;
};

using ConfidenceMap = std::map<Edge, EdgeConfidence>;

/// The adjacency states of one run, kept side by side.
struct AdjacencyStage {
  EdgeSet base;          ///< after sparsification
  EdgeSet virtual_edges; ///< base plus same-soft-label similar pairs (PageRank input only)
  EdgeSet reconfigured;  ///< base with selected x selected re-judged
  std::vector<NodeId> selected;
  ConfidenceMap confidences;

  friend bool operator==(const AdjacencyStage&, const AdjacencyStage&) = default;
};

/// Adds every pair (i, j) whose soft labels are equal and known and whose
/// embedding cosine exceeds tau1. Base edges are always kept. Rows of
/// `embeddings` are expected to be unit-norm or zero.
EdgeSet virtual_edges(const DenseMatrix& embeddings, std::span<const std::optional<ClassId>> soft_labels,
                      const EdgeSet& base, double tau1);

struct PageRankResult {
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration with uniform teleport; dangling nodes spread their mass
/// uniformly. Stops when the L1 change drops below `tol`.
PageRankResult pagerank(const EdgeSet& edges, std::size_t num_nodes, double damping = 0.85, double tol = 1e-8,
                        std::size_t max_iter = 200);

/// Ids of the k largest scores (ties to the lower id), ascending.
/// Throws std::invalid_argument unless 1 <= k <= scores.size().
std::vector<NodeId> select_top_k(std::span<const double> scores, std::size_t k);

/// max(1, floor(fraction * train_count)), capped at num_nodes.
std::size_t selection_size(std::size_t train_count, std::size_t num_nodes, double fraction = 0.10);

/// First decimal number in the completion that lies in [0, 1].
std::optional<double> parse_confidence(std::string_view completion);

struct ReconfigureResult {
  EdgeSet edges;
  ConfidenceMap confidences;
  std::size_t calls = 0;
  std::size_t fallbacks = 0;
};

/// Re-judges every pair of the complete graph on `selected` with an
/// EdgeJudge prompt; a pair is kept iff its confidence exceeds tau2. Pairs
/// with an endpoint outside `selected` copy `base`. An unparsable answer is
/// retried once without the cache, then falls back to the base value.
ReconfigureResult reconfigure_edges(std::span<const NodeId> selected, const std::vector<std::string>& aggregated_texts,
                                    const std::vector<std::string>& soft_label_names, const EdgeSet& base, double tau2,
                                    llm::LlmGateway& gateway, std::string_view dataset_description);

// Persistence: edge lists as "u v" lines (u < v); confidences as CSV
// "u,v,score,source" with source in {llm, fallback}; selected ids one per line.
void write_edge_list(std::ostream& out, const EdgeSet& edges);
EdgeSet read_edge_list(std::istream& in);
void write_confidences(std::ostream& out, const ConfidenceMap& confidences);
ConfidenceMap read_confidences(std::istream& in);

/// Files "<prefix>.base.edges", ".virtual.edges", ".reconfigured.edges",
/// ".selected.txt", ".confidences.csv" under `dir`.
void save_stage(const std::filesystem::path& dir, std::string_view prefix, const AdjacencyStage& stage);
AdjacencyStage load_stage(const std::filesystem::path& dir, std::string_view prefix);
bool stage_exists(const std::filesystem::path& dir, std::string_view prefix);

}  // namespace ultratag::structure
