#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ultratag/pipeline/pipeline.hpp"

namespace ultratag::pipeline {

/// Deterministic summary: configuration echo, per-seed accuracy and
/// counters, mean and std. Nothing time- or cache-dependent.
std::string report_json(const RunReport& r);
std::string report_csv(const RunReport& r);
/// Timings and cache hit counts.
std::string run_meta_json(const RunReport& r);

/// Writes "report.json" or "report.csv" (format "json"|"csv") plus
/// "run_meta.json" into dir. Throws ConfigError on an unknown format.
void write_run_outputs(const std::filesystem::path& dir, const RunReport& r, const std::string& format);

/// "ratio,mean,std" rows and the long "ratio,seed,accuracy" form.
void write_sweep_csv(std::ostream& out, const std::vector<RunReport>& runs);
void write_sweep_long_csv(std::ostream& out, const std::vector<RunReport>& runs);

/// Markdown table with one row per variant: name, mean, std.
std::string ablation_table(const std::vector<std::pair<std::string, RunReport>>& variants);

/// "0.8132" style fixed 4-decimal rendering used in tables.
std::string fixed4(double v);

}  // namespace ultratag::pipeline
