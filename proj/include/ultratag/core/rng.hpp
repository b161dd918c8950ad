#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ultratag {

/// Seeded random stream with platform-stable draws.
///
/// The engine (mt19937_64) is fully specified by the standard, but the
/// standard distributions are not, so the bounded and real draws are done
/// here. Independent consumers take their own named substream so that adding
/// draws in one place never perturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Substream derived from (seed, name).
  static Rng substream(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  /// `count` distinct indices from [0, n), uniformly without replacement,
  /// returned in ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ultratag
