#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ultratag/augment/text_augment.hpp"
#include "ultratag/embed/embedder.hpp"
#include "ultratag/gnn/gcn.hpp"
#include "ultratag/llm/provider.hpp"

namespace ultratag::pipeline {

struct SyntheticSpec {
  std::size_t classes = 4;
  std::size_t nodes_per_class = 150;
  double p_intra = 0.05;
  double p_inter = 0.002;
  std::size_t vocab_per_class = 40;
  std::size_t noise_vocab = 120;
  std::size_t words_per_node = 24;
  std::size_t words_per_sentence = 8;
  double noise_fraction = 0.3;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 7;
};

enum class Method { UltraTag, Gcn, Mlp };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Which UltraTAG-S modules run; all on is the full method.
struct ModuleFlags {
  bool text_aug = true;
  bool struct_aug = true;
  bool struct_learn = true;

  friend bool operator==(const ModuleFlags&, const ModuleFlags&) = default;
};

struct PipelineConfig {
  std::filesystem::path dataset;      ///< JSONL dataset; empty = synthetic
  std::string dataset_name;           ///< selects a built-in prompt description
  std::string dataset_description;    ///< overrides the description when set
  SyntheticSpec synthetic;
  Method method = Method::UltraTag;
  double sparsity = 0.0;
  std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46};
  double tau1 = 0.8;
  double tau2 = 0.5;
  double k_fraction = 0.10;
  double pagerank_damping = 0.85;
  std::size_t char_budget = augment::kDefaultCharBudget;
  augment::AggregationMode aggregation = augment::AggregationMode::OT_SKWSL;
  ModuleFlags modules;
  llm::ProviderConfig llm;
  embed::EmbeddingProviderConfig embedding;
  gnn::TrainConfig train;
  std::filesystem::path output_dir = "runs/default";
  /// Stage artifacts; empty means "<output_dir>/artifacts".
  std::filesystem::path artifact_dir;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Sets one dotted key ("tau1", "train.lr", "llm.provider", ...).
/// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Current value of a key, formatted as apply_setting accepts it.
std::string get_setting(const PipelineConfig& cfg, std::string_view key);

/// Every recognized key, in a fixed order.
const std::vector<std::string>& config_keys();

/// Reads "key = value" lines; "[section]" prefixes later keys with
/// "section."; '#' starts a comment.
void apply_config_text(PipelineConfig& cfg, std::string_view text);
void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// All keys as sorted "key=value" lines; stable across runs.
std::string canonical_config(const PipelineConfig& cfg);

}  // namespace ultratag::pipeline
