#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ultratag/llm/provider.hpp"
#include "ultratag/llm/response_cache.hpp"

namespace ultratag::llm {

struct GatewayStats {
  std::size_t fresh = 0;
  std::size_t cached = 0;
};

struct CallOptions {
  /// Skip the cache lookup (the fresh response still overwrites the entry).
  bool bypass_cache = false;
};

/// Front door for all completion calls: cache lookup, provider dispatch,
/// audit logging of remote traffic, and bounded-concurrency batches.
class LlmGateway {
 public:
  explicit LlmGateway(const ProviderConfig& cfg);
  LlmGateway(std::unique_ptr<CompletionProvider> provider, std::filesystem::path cache_dir = {},
             std::size_t workers = 4);

  std::string complete(const RenderedPrompt& prompt, CallOptions opts = {});

  /// Output i answers prompts[i], independent of completion order.
  std::vector<std::string> complete_batch(std::span<const RenderedPrompt> prompts, CallOptions opts = {});

  std::string key_for(const RenderedPrompt& prompt) const;

  GatewayStats stats() const { return {fresh_.load(), cached_.load()}; }
  ProviderKind provider_kind() const noexcept { return provider_->kind(); }
  std::string model() const { return provider_->model(); }
  std::size_t workers() const noexcept { return workers_; }

  /// Remote calls append "hash\ttimestamp\trequest_bytes\tresponse_bytes" here.
  std::optional<std::filesystem::path> audit_log_path() const { return audit_path_; }

 private:
  void audit(const std::string& key, std::size_t request_bytes, std::size_t response_bytes);

  std::unique_ptr<CompletionProvider> provider_;
  std::optional<ResponseCache> cache_;
  std::optional<std::filesystem::path> audit_path_;
  std::size_t workers_;
  std::atomic<std::size_t> fresh_{0};
  std::atomic<std::size_t> cached_{0};
  std::mutex audit_mutex_;
};

}  // namespace ultratag::llm
