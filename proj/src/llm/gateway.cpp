#include "ultratag/llm/gateway.hpp"

#include <chrono>
#include <fstream>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/parallel.hpp"

namespace ultratag::llm {

namespace {
std::unique_ptr<CompletionProvider> make_provider(const ProviderConfig& cfg) {
  if (cfg.kind == ProviderKind::Remote) return std::make_unique<RemoteProvider>(cfg);
  return std::make_unique<OfflineProvider>();
}
}  // namespace

LlmGateway::LlmGateway(const ProviderConfig& cfg)
    : LlmGateway(make_provider(cfg), cfg.cache_dir, cfg.workers) {}

LlmGateway::LlmGateway(std::unique_ptr<CompletionProvider> provider, std::filesystem::path cache_dir,
                       std::size_t workers)
    : provider_(std::move(provider)), workers_(std::max<std::size_t>(1, workers)) {
  if (!cache_dir.empty()) {
    cache_.emplace(cache_dir);
    if (provider_->kind() == ProviderKind::Remote) audit_path_ = cache_dir / "audit.log";
  }
}

std::string LlmGateway::key_for(const RenderedPrompt& prompt) const {
  return cache_key(provider_->kind(), provider_->model(), prompt.full_text);
}

std::string LlmGateway::complete(const RenderedPrompt& prompt, CallOptions opts) {
  const auto key = key_for(prompt);
  if (cache_ && !opts.bypass_cache) {
    if (auto hit = cache_->get(key)) {
      cached_.fetch_add(1);
      return *std::move(hit);
    }
  }
  std::string response;
  try {
    response = provider_->complete(prompt);
  } catch (const TransportError& e) {
    throw TransportError(e.what(), key);
  }
  fresh_.fetch_add(1);
  if (cache_) cache_->put(key, response);
  if (provider_->kind() == ProviderKind::Remote) audit(key, prompt.full_text.size(), response.size());
  return response;
}

std::vector<std::string> LlmGateway::complete_batch(std::span<const RenderedPrompt> prompts, CallOptions opts) {
  std::vector<std::string> out(prompts.size());
  parallel_for_indexed(prompts.size(), workers_, [&](std::size_t i) { out[i] = complete(prompts[i], opts); });
  return out;
}

void LlmGateway::audit(const std::string& key, std::size_t request_bytes, std::size_t response_bytes) {
  if (!audit_path_) return;
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::lock_guard lock(audit_mutex_);
  std::ofstream log(*audit_path_, std::ios::app);
  log << key << '\t' << now << '\t' << request_bytes << '\t' << response_bytes << '\n';
}

}  // namespace ultratag::llm
