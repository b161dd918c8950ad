#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ultratag/llm/provider.hpp"

namespace ultratag::llm {

/// SHA-256 over (provider kind, model name, full prompt text).
std::string cache_key(ProviderKind kind, std::string_view model, std::string_view full_text);

/// One file per key, named by the hex key, holding the raw completion bytes.
/// Writes go to a unique temp file and are renamed into place, so concurrent
/// writers of the same key leave one complete file behind.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, std::string_view value) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace ultratag::llm
