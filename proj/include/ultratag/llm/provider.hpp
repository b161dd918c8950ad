#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ultratag/llm/prompt.hpp"

namespace ultratag::llm {

enum class ProviderKind { Remote, Offline };

std::string_view to_string(ProviderKind kind);
ProviderKind parse_provider_kind(std::string_view name);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::Offline;
  /// Base URL, e.g. "http://localhost:8000"; "/v1/chat/completions" is appended.
  std::string endpoint = "http://localhost:8000";
  std::string model = "Meta-Llama-3-8B-Instruct";
  /// Remote calls are always sent with temperature 0.
  double temperature = 0.0;
  int max_retries = 2;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff{500};
  /// Empty path disables the response cache.
  std::filesystem::path cache_dir;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t workers = 4;
};

/// Produces raw completion text for a rendered prompt. Implementations must
/// be safe to call concurrently.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const RenderedPrompt& prompt) = 0;
  virtual ProviderKind kind() const noexcept = 0;
  virtual std::string model() const = 0;
};

// Deterministic rule-based stand-ins. Tokenization is ultratag::tokenize.

/// First min(3, all) sentences, trimmed and joined by single spaces.
std::string offline_summarize(std::string_view text);
/// Top-5 tokens by term frequency (ties lexicographic), joined with ", ".
std::string offline_keywords(std::string_view text);
/// Class whose name tokens overlap the text tokens most (ties: class order).
std::string offline_soft_label(std::string_view text, const std::vector<std::string>& class_names);
/// Jaccard similarity of the two token sets, rendered as a decimal.
std::string offline_edge_score(std::string_view text_a, std::string_view text_b);

class OfflineProvider final : public CompletionProvider {
 public:
  explicit OfflineProvider(std::string model = "offline-rules-v1") : model_(std::move(model)) {}
  std::string complete(const RenderedPrompt& prompt) override;
  ProviderKind kind() const noexcept override { return ProviderKind::Offline; }
  std::string model() const override { return model_; }

 private:
  std::string model_;
};

/// OpenAI-compatible chat-completions client with retry and backoff.
class RemoteProvider final : public CompletionProvider {
 public:
  explicit RemoteProvider(ProviderConfig cfg);
  std::string complete(const RenderedPrompt& prompt) override;
  ProviderKind kind() const noexcept override { return ProviderKind::Remote; }
  std::string model() const override { return cfg_.model; }

  /// Request body for one prompt.
  static std::string build_request_body(std::string_view model, std::string_view content);
  /// Content of the first choice; throws TransportError on a malformed body.
  static std::string extract_content(std::string_view response_body);

 private:
  ProviderConfig cfg_;
  std::string api_key_;
};

/// Splits "scheme://host[:port][/prefix]" into ("scheme://host[:port]", "/prefix").
std::pair<std::string, std::string> split_endpoint(std::string_view url);

}  // namespace ultratag::llm
