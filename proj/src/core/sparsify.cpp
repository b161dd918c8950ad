#include "ultratag/core/sparsify.hpp"

#include <cmath>
#include <stdexcept>

#include "ultratag/core/rng.hpp"

namespace ultratag {

std::size_t removal_count(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("sparsity ratio must be in [0, 1]");
  const auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  return std::min(count, n);
}

TextAttributedGraph sparsify(const TextAttributedGraph& g, const SparsityConfig& cfg) {
  TextAttributedGraph out = g;

  auto text_rng = Rng::substream(cfg.seed, "sparsify/texts");
  for (std::size_t id : text_rng.sample_without_replacement(g.num_nodes, removal_count(cfg.ratio, g.num_nodes))) {
    out.texts[id].reset();
  }

  auto edge_rng = Rng::substream(cfg.seed, "sparsify/edges");
  const auto drop = edge_rng.sample_without_replacement(g.edges.size(), removal_count(cfg.ratio, g.edges.size()));
  std::vector<Edge> kept;
  kept.reserve(g.edges.size() - drop.size());
  std::size_t d = 0;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (d < drop.size() && drop[d] == i) {
      ++d;
      continue;
    }
    kept.push_back(g.edges.edges()[i]);
  }
  out.edges = EdgeSet(std::move(kept));
  return out;
}

}  // namespace ultratag
