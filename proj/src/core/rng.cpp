#include "ultratag/core/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ultratag/core/hash.hpp"

namespace ultratag {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::string_view name) {
  return Rng(splitmix64(seed ^ splitmix64(fnv1a64(name))));
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  // Rejection sampling on the top of the range to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) throw std::invalid_argument("sample_without_replacement: count > n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots become the sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace ultratag
