#include "ultratag/augment/text_augment.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/parallel.hpp"
#include "ultratag/core/text.hpp"

namespace ultratag::augment {

std::vector<std::string> propagate_texts(const TextAttributedGraph& g, std::size_t char_budget) {
  const auto adj = g.edges.adjacency_lists(g.num_nodes);
  std::vector<std::string> out(g.num_nodes);

  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    const std::string_view own = g.texts[i] ? std::string_view(*g.texts[i]) : std::string_view();
    std::string result(utf8_truncate(own, char_budget));

    std::vector<std::string_view> nbr_texts;
    for (NodeId j : adj[i]) {
      if (g.texts[j] && !g.texts[j]->empty()) nbr_texts.push_back(*g.texts[j]);
    }
    if (nbr_texts.empty()) {
      out[i] = std::move(result);
      continue;
    }

    // Water-filling: serve the smallest needs first with an equal share of
    // what is left.
    std::size_t available = char_budget - result.size();
    std::vector<std::size_t> need(nbr_texts.size());
    for (std::size_t k = 0; k < nbr_texts.size(); ++k) need[k] = kNeighborSeparator.size() + nbr_texts[k].size();
    std::vector<std::size_t> order(need.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return need[a] < need[b]; });
    std::vector<std::size_t> grant(need.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) {
      const std::size_t share = available / (order.size() - r);
      grant[order[r]] = std::min(need[order[r]], share);
      available -= grant[order[r]];
    }

    for (std::size_t k = 0; k < nbr_texts.size(); ++k) {
      if (grant[k] <= kNeighborSeparator.size()) continue;
      result += kNeighborSeparator;
      result += utf8_truncate(nbr_texts[k], grant[k] - kNeighborSeparator.size());
    }
    out[i] = std::move(result);
  }
  return out;
}

std::optional<ClassId> parse_soft_label(std::string_view raw, const std::vector<std::string>& class_names) {
  const auto needle = to_lower(trim(raw));
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    if (to_lower(trim(class_names[c])) == needle) return static_cast<ClassId>(c);
  }
  std::optional<ClassId> found;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const auto name = to_lower(trim(class_names[c]));
    if (name.empty() || needle.find(name) == std::string::npos) continue;
    if (found) return std::nullopt;
    found = static_cast<ClassId>(c);
  }
  return found;
}

std::size_t augment_call_count(const std::vector<std::string>& propagated) {
  return 3 * static_cast<std::size_t>(std::count_if(propagated.begin(), propagated.end(),
                                                    [](const std::string& t) { return !t.empty(); }));
}

std::vector<AugmentedNodeText> augment(const TextAttributedGraph& g, const std::vector<std::string>& propagated,
                                       llm::LlmGateway& gateway, std::string_view dataset_description) {
  if (propagated.size() != g.num_nodes) throw std::invalid_argument("augment: propagated size != num_nodes");

  std::vector<AugmentedNodeText> out(g.num_nodes);
  std::vector<llm::RenderedPrompt> prompts;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    out[i].original = g.texts[i];
    out[i].propagated = propagated[i];
    if (propagated[i].empty()) continue;
    for (auto kind : {llm::PromptKind::Summary, llm::PromptKind::Keywords, llm::PromptKind::SoftLabel}) {
      prompts.push_back(llm::render_prompt(kind, dataset_description, {{propagated[i]}, {}}, g.class_names));
      owner.push_back(i);
    }
  }

  std::vector<std::string> responses(prompts.size());
  parallel_for_indexed(prompts.size(), gateway.workers(), [&](std::size_t k) {
    try {
      responses[k] = gateway.complete(prompts[k]);
    } catch (const TransportError& e) {
      throw TransportError("node " + std::to_string(owner[k]) + ": " + e.what(), e.prompt_hash());
    }
  });

  for (std::size_t k = 0; k < prompts.size(); ++k) {
    auto& node = out[owner[k]];
    switch (prompts[k].kind) {
      case llm::PromptKind::Summary: node.summary = std::string(trim(responses[k])); break;
      case llm::PromptKind::Keywords: node.keywords = std::string(trim(responses[k])); break;
      case llm::PromptKind::SoftLabel:
        node.soft_label_raw = responses[k];
        node.soft_label = parse_soft_label(responses[k], g.class_names);
        break;
      case llm::PromptKind::EdgeJudge: break;
    }
  }
  return out;
}

AggregationMode parse_aggregation_mode(std::string_view name) {
  if (name == "OT") return AggregationMode::OT;
  if (name == "OT+Su") return AggregationMode::OT_Su;
  if (name == "OT+KW") return AggregationMode::OT_KW;
  if (name == "OT+SL") return AggregationMode::OT_SL;
  if (name == "OT+SKWSL") return AggregationMode::OT_SKWSL;
  throw std::invalid_argument("unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view to_string(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::OT: return "OT";
    case AggregationMode::OT_Su: return "OT+Su";
    case AggregationMode::OT_KW: return "OT+KW";
    case AggregationMode::OT_SL: return "OT+SL";
    case AggregationMode::OT_SKWSL: return "OT+SKWSL";
  }
  return "?";
}

std::string soft_label_name(const std::optional<ClassId>& label, const std::vector<std::string>& class_names) {
  if (label && *label < class_names.size()) return class_names[*label];
  return "Unknown";
}

std::string aggregate(const AugmentedNodeText& a, AggregationMode mode, const std::vector<std::string>& class_names) {
  const bool su = mode == AggregationMode::OT_Su || mode == AggregationMode::OT_SKWSL;
  const bool kw = mode == AggregationMode::OT_KW || mode == AggregationMode::OT_SKWSL;
  const bool sl = mode == AggregationMode::OT_SL || mode == AggregationMode::OT_SKWSL;
  std::string out = a.propagated;
  if (su) out += "\n[SUMMARY] " + a.summary;
  if (kw) out += "\n[KEYWORDS] " + a.keywords;
  if (sl) out += "\n[LABEL] " + soft_label_name(a.soft_label, class_names);
  return out;
}

}  // namespace ultratag::augment
