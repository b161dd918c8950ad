#pragma once

#include <cstddef>
#include <cstdint>

#include "ultratag/core/graph.hpp"

namespace ultratag {

struct SparsityConfig {
  double ratio = 0.0;  ///< in [0, 1]
  std::uint64_t seed = 0;
};

/// floor(ratio * n), robust to decimal ratios that are not exact in binary
/// (0.29 * 100 counts as 29, not 28).
std::size_t removal_count(double ratio, std::size_t n);

/// Marks floor(ratio*N) node texts missing and drops floor(ratio*|E|) edges,
/// both uniformly without replacement. Texts and edges draw from separate
/// named substreams of `cfg.seed`. Labels and splits are untouched.
TextAttributedGraph sparsify(const TextAttributedGraph& g, const SparsityConfig& cfg);

}  // namespace ultratag
