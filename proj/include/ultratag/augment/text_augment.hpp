#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ultratag/core/graph.hpp"
#include "ultratag/llm/gateway.hpp"

namespace ultratag::augment {

inline constexpr std::string_view kNeighborSeparator = "\n[NBR] ";
inline constexpr std::size_t kDefaultCharBudget = 4000;

struct AugmentedNodeText {
  std::optional<std::string> original;
  std::string propagated;
  std::string summary;
  std::string keywords;
  std::optional<ClassId> soft_label;  ///< nullopt = Unknown
  std::string soft_label_raw;         ///< completion as returned
  std::string aggregated;

  friend bool operator==(const AugmentedNodeText&, const AugmentedNodeText&) = default;
};

/// One-hop text propagation: own text (empty if missing) followed by every
/// neighbor with non-empty text in ascending id order, each prefixed by
/// kNeighborSeparator. Output is at most `char_budget` bytes; neighbor
/// contributions share the space left after the own text (water-filling, so
/// short neighbors are kept whole) and the own text is cut only when it
/// alone exceeds the budget.
std::vector<std::string> propagate_texts(const TextAttributedGraph& g,
                                         std::size_t char_budget = kDefaultCharBudget);

/// Case-insensitive exact match on the trimmed completion, else the unique
/// class name contained in it, else nullopt (Unknown).
std::optional<ClassId> parse_soft_label(std::string_view raw, const std::vector<std::string>& class_names);

/// Summary, keywords and soft-label completions for every node. Nodes with
/// an empty propagated text issue no calls and get "", "", Unknown.
/// Transport errors are rethrown with the node id attached.
std::vector<AugmentedNodeText> augment(const TextAttributedGraph& g, const std::vector<std::string>& propagated,
                                       llm::LlmGateway& gateway, std::string_view dataset_description);

/// Number of completions `augment` issues for these propagated texts.
std::size_t augment_call_count(const std::vector<std::string>& propagated);

enum class AggregationMode { OT, OT_Su, OT_KW, OT_SL, OT_SKWSL };

AggregationMode parse_aggregation_mode(std::string_view name);
std::string_view to_string(AggregationMode mode);

/// Soft-label name as rendered into prompts and aggregated text.
std::string soft_label_name(const std::optional<ClassId>& label, const std::vector<std::string>& class_names);

/// Concatenates the propagated text with the parts `mode` names, in the
/// fixed order summary, keywords, label.
std::string aggregate(const AugmentedNodeText& a, AggregationMode mode, const std::vector<std::string>& class_names);

// JSONL persistence, one record per node:
// {"id","original","propagated","summary","keywords","soft_label","soft_label_raw"}
void write_augmented(std::ostream& out, const std::vector<AugmentedNodeText>& nodes);
std::vector<AugmentedNodeText> read_augmented(std::istream& in);

}  // namespace ultratag::augment
