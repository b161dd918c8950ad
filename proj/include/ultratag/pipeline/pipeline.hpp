#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ultratag/core/graph.hpp"
#include "ultratag/llm/gateway.hpp"
#include "ultratag/pipeline/config.hpp"

namespace ultratag::pipeline {

enum class FailureKind { None, Transport, Numeric, Data, Internal };
std::string_view to_string(FailureKind kind);

/// Deterministic per-seed counters.
struct SeedCounts {
  std::size_t augment_calls = 0;   ///< summary + keyword + soft-label completions
  std::size_t edge_judgements = 0; ///< pairs re-judged during reconfiguration
  std::size_t fallbacks = 0;       ///< pairs that fell back to the base edge
  std::size_t base_edges = 0;
  std::size_t virtual_edges = 0;
  std::size_t final_edges = 0;
  std::size_t selected = 0;
  std::size_t best_epoch = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  FailureKind failure = FailureKind::None;
  std::string error;
  double accuracy = 0.0;
  SeedCounts counts;

  // Volatile, reported only in run metadata.
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::size_t fresh_calls = 0;
  std::size_t cached_calls = 0;
  std::vector<std::string> reused_artifacts;

  bool ok() const noexcept { return failure == FailureKind::None; }
};

struct RunReport {
  std::string dataset;
  std::string method;
  double sparsity = 0.0;
  std::string aggregation;
  ModuleFlags modules;
  std::vector<SeedResult> seeds;

  /// Over successful seeds; std is the sample standard deviation (0 for
  /// fewer than two). NaN when no seed succeeded.
  double mean_accuracy() const;
  double std_accuracy() const;
  bool complete() const;
  /// 0 when every seed succeeded, else 3 (transport), 4 (numeric) or 1,
  /// taken from the first failing seed.
  int exit_code() const;
};

/// Dataset named by the config, or the synthetic graph when none is given.
TextAttributedGraph load_input(const PipelineConfig& cfg);

/// Prompt description: explicit override, built-in by name, else generic.
std::string dataset_description(const PipelineConfig& cfg, const TextAttributedGraph& g);

/// Runs every seed of cfg.seeds. Per-seed failures are recorded in the
/// report rather than thrown; invalid configurations throw ConfigError.
/// Writes per-seed history, checkpoints and predictions under
/// cfg.output_dir and reuses stage artifacts found in the artifact dir.
RunReport run_pipeline(const PipelineConfig& cfg, const TextAttributedGraph& g, llm::LlmGateway& gateway);
RunReport run_pipeline(const PipelineConfig& cfg, const TextAttributedGraph& g);

/// One run per ratio; outputs go to "<output_dir>/ratio_<ratio>" with a
/// shared artifact directory and response cache.
std::vector<RunReport> run_sweep(const PipelineConfig& cfg, const TextAttributedGraph& g,
                                 const std::vector<double>& ratios);

}  // namespace ultratag::pipeline
