#include "ultratag/pipeline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/rng.hpp"

namespace ultratag::pipeline {

namespace {

void check_spec(const SyntheticSpec& s) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (s.classes < 1 || s.nodes_per_class < 1) throw ConfigError("synthetic: classes and nodes_per_class must be positive");
  if (!prob(s.p_intra) || !prob(s.p_inter)) throw ConfigError("synthetic: edge probabilities must be in [0, 1]");
  if (s.p_inter >= s.p_intra) throw ConfigError("synthetic: p_inter must be smaller than p_intra");
  if (s.vocab_per_class < 3) throw ConfigError("synthetic: vocab_per_class must be at least 3");
  if (s.words_per_node < 1 || s.words_per_sentence < 1) throw ConfigError("synthetic: word counts must be positive");
  if (!(s.noise_fraction >= 0.0 && s.noise_fraction < 1.0)) throw ConfigError("synthetic: noise_fraction must be in [0, 1)");
  if (s.noise_fraction > 0.0 && s.noise_vocab == 0) throw ConfigError("synthetic: noise_vocab must be positive");
  const double total = s.train_fraction + s.val_fraction + s.test_fraction;
  if (s.train_fraction < 0 || s.val_fraction < 0 || s.test_fraction < 0 || total > 1.0 + 1e-12) {
    throw ConfigError("synthetic: split fractions must be non-negative and sum to at most 1");
  }
}

std::string class_word(std::size_t c, std::size_t j) { return "c" + std::to_string(c) + "w" + std::to_string(j); }

}  // namespace

TextAttributedGraph gen_synthetic(const SyntheticSpec& spec) {
  check_spec(spec);
  const std::size_t n = spec.classes * spec.nodes_per_class;

  TextAttributedGraph g;
  g.num_nodes = n;
  std::vector<ClassId> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<ClassId>(i % spec.classes);
  g.labels.assign(label.begin(), label.end());
  for (std::size_t c = 0; c < spec.classes; ++c) {
    g.class_names.push_back(class_word(c, 0) + " " + class_word(c, 1) + " " + class_word(c, 2));
  }

  Rng edge_rng = Rng::substream(spec.seed, "synthetic/edges");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = label[i] == label[j] ? spec.p_intra : spec.p_inter;
      if (edge_rng.bernoulli(p)) edges.push_back(Edge::make(static_cast<NodeId>(i), static_cast<NodeId>(j)));
    }
  }
  g.edges = EdgeSet(std::move(edges));

  std::vector<double> cdf(spec.vocab_per_class);
  double acc = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) cdf[j] = acc += 1.0 / static_cast<double>(j + 1);
  for (auto& v : cdf) v /= acc;

  Rng text_rng = Rng::substream(spec.seed, "synthetic/texts");
  g.texts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    for (std::size_t w = 0; w < spec.words_per_node; ++w) {
      std::string word;
      if (text_rng.bernoulli(spec.noise_fraction)) {
        word = "n" + std::to_string(text_rng.uniform_index(spec.noise_vocab));
      } else {
        const double u = text_rng.uniform01();
        const auto j = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        word = class_word(label[i], std::min(j, cdf.size() - 1));
      }
      const bool sentence_start = w % spec.words_per_sentence == 0;
      if (!sentence_start) text += ' ';
      else if (w > 0) text += ". ";
      text += word;
    }
    text += '.';
    g.texts[i] = std::move(text);
  }

  Rng split_rng = Rng::substream(spec.seed, "synthetic/splits");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[split_rng.uniform_index(i)]);
  const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(n) + 1e-9));
  const auto n_test = std::min(n - n_train - n_val,
                               static_cast<std::size_t>(std::floor(spec.test_fraction * static_cast<double>(n) + 1e-9)));
  auto& s = g.splits;
  for (std::size_t r = 0; r < n; ++r) {
    const auto node = static_cast<NodeId>(order[r]);
    if (r < n_train) s.train.push_back(node);
    else if (r < n_train + n_val) s.val.push_back(node);
    else if (r < n_train + n_val + n_test) s.test.push_back(node);
    else s.out.push_back(node);
  }
  for (auto* part : {&s.train, &s.val, &s.test, &s.out}) std::sort(part->begin(), part->end());
  g.validate();
  return g;
}

}  // namespace ultratag::pipeline
