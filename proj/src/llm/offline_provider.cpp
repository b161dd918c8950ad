#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "ultratag/core/text.hpp"
#include "ultratag/llm/provider.hpp"

namespace ultratag::llm {

std::string_view to_string(ProviderKind kind) {
  return kind == ProviderKind::Remote ? "remote" : "offline";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "remote") return ProviderKind::Remote;
  if (name == "offline") return ProviderKind::Offline;
  throw std::invalid_argument("unknown provider kind '" + std::string(name) + "'");
}

std::string offline_summarize(std::string_view text) {
  std::vector<std::string_view> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size() && sentences.size() < 3; ++i) {
    const char c = text[i];
    const bool terminator = c == '.' || c == '!' || c == '?';
    const bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (terminator && boundary) {
      auto s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) sentences.push_back(s);
      start = i + 1;
    }
  }
  if (sentences.size() < 3 && start < text.size()) {
    auto tail = trim(text.substr(start));
    if (!tail.empty()) sentences.push_back(tail);
  }
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += ' ';
    out += sentences[i];
  }
  return out;
}

std::string offline_keywords(std::string_view text) {
  std::map<std::string, std::size_t> tf;
  for (auto& tok : tokenize(text)) ++tf[tok];
  std::vector<std::pair<std::string, std::size_t>> ranked(tf.begin(), tf.end());
  // Map iteration is already lexicographic, so a stable sort on count keeps ties in order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string out;
  for (std::size_t i = 0; i < ranked.size() && i < 5; ++i) {
    if (i > 0) out += ", ";
    out += ranked[i].first;
  }
  return out;
}

std::string offline_soft_label(std::string_view text, const std::vector<std::string>& class_names) {
  if (class_names.empty()) return {};
  const auto tokens = tokenize(text);
  const std::set<std::string> text_set(tokens.begin(), tokens.end());
  std::size_t best = 0;
  std::size_t best_overlap = 0;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const auto name_tokens = tokenize(class_names[c]);
    const std::set<std::string> name_set(name_tokens.begin(), name_tokens.end());
    std::size_t overlap = 0;
    for (const auto& t : name_set) overlap += text_set.count(t);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = c;
    }
  }
  return class_names[best];
}

std::string offline_edge_score(std::string_view text_a, std::string_view text_b) {
  const auto ta = tokenize(text_a);
  const auto tb = tokenize(text_b);
  const std::set<std::string> a(ta.begin(), ta.end());
  const std::set<std::string> b(tb.begin(), tb.end());
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  const double score = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return format_decimal(score);
}

std::string OfflineProvider::complete(const RenderedPrompt& prompt) {
  const auto& texts = prompt.payload.texts;
  switch (prompt.kind) {
    case PromptKind::Summary: return offline_summarize(texts.at(0));
    case PromptKind::Keywords: return offline_keywords(texts.at(0));
    case PromptKind::SoftLabel: return offline_soft_label(texts.at(0), prompt.class_names);
    case PromptKind::EdgeJudge: return offline_edge_score(texts.at(0), texts.at(1));
  }
  throw std::logic_error("unhandled prompt kind");
}

}  // namespace ultratag::llm
