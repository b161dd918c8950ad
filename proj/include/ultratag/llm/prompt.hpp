#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ultratag::llm {

enum class PromptKind { Summary, Keywords, SoftLabel, EdgeJudge };

std::string_view to_string(PromptKind kind);

/// One text for Summary/Keywords/SoftLabel; two texts and two soft-label
/// names for EdgeJudge.
struct PromptPayload {
  std::vector<std::string> texts;
  std::vector<std::string> soft_labels;
};

struct RenderedPrompt {
  PromptKind kind = PromptKind::Summary;
  std::string dataset_description;
  std::string question;
  std::string full_text;  ///< dataset_description + question
  PromptPayload payload;
  std::vector<std::string> class_names;
};

/// Instantiates the "dataset description + question" template for `kind`.
/// A non-empty description without trailing whitespace gets one space
/// appended so the two sections do not run together.
/// Throws std::invalid_argument on payload arity mismatch.
RenderedPrompt render_prompt(PromptKind kind, std::string_view dataset_description,
                             PromptPayload payload, std::vector<std::string> class_names = {});

/// Built-in descriptions for the benchmark datasets, keyed by lowercase
/// name: cora, citeseer, pubmed, wikics, instagram, reddit, elo-photo.
std::optional<std::string> builtin_dataset_description(std::string_view name);

/// Description for datasets without a built-in one.
std::string generic_dataset_description(const std::vector<std::string>& class_names);

}  // namespace ultratag::llm
