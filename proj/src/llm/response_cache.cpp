#include "ultratag/llm/response_cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "ultratag/core/hash.hpp"

namespace ultratag::llm {

std::string cache_key(ProviderKind kind, std::string_view model, std::string_view full_text) {
  return FieldHasher().add(to_string(kind)).add(model).add(full_text).hex();
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::ifstream in(dir_ / key, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ResponseCache::put(const std::string& key, std::string_view value) const {
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream tmp_name;
  tmp_name << '.' << key << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << '.' << counter.fetch_add(1);
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
    if (!out) throw std::runtime_error("short write on cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / key);
}

}  // namespace ultratag::llm
