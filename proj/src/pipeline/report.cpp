#include "ultratag/pipeline/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/text.hpp"

namespace ultratag::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string csv_number(double v) { return std::isfinite(v) ? format_decimal(v) : "nan"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

std::string fixed4(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string report_json(const RunReport& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["sparsity"] = r.sparsity;
  j["sparsity_label"] = format_percent(r.sparsity);
  j["aggregation"] = r.aggregation;
  j["modules"] = {{"text_aug", r.modules.text_aug},
                  {"struct_aug", r.modules.struct_aug},
                  {"struct_learn", r.modules.struct_learn}};
  ordered_json seeds = ordered_json::array();
  for (const auto& s : r.seeds) {
    ordered_json e;
    e["seed"] = s.seed;
    e["status"] = std::string(to_string(s.failure));
    if (s.ok()) {
      e["accuracy"] = s.accuracy;
    } else {
      e["error"] = s.error;
    }
    e["llm_calls"] = {{"augment", s.counts.augment_calls}, {"edge_judgements", s.counts.edge_judgements}};
    e["fallbacks"] = s.counts.fallbacks;
    e["edges"] = {{"base", s.counts.base_edges}, {"virtual", s.counts.virtual_edges}, {"final", s.counts.final_edges}};
    e["selected"] = s.counts.selected;
    e["best_epoch"] = s.counts.best_epoch;
    seeds.push_back(std::move(e));
  }
  j["seeds"] = std::move(seeds);
  j["mean_accuracy"] = number_or_null(r.mean_accuracy());
  j["std_accuracy"] = number_or_null(r.std_accuracy());
  j["complete"] = r.complete();
  return j.dump(2) + "\n";
}

std::string report_csv(const RunReport& r) {
  std::string out = "# dataset=" + r.dataset + " method=" + r.method + " sparsity=" + format_percent(r.sparsity) +
                    " aggregation=" + r.aggregation + "\n";
  out += "seed,status,accuracy,augment_calls,edge_judgements,fallbacks,selected,final_edges,best_epoch,error\n";
  for (const auto& s : r.seeds) {
    out += std::to_string(s.seed) + "," + std::string(to_string(s.failure)) + "," +
           (s.ok() ? csv_number(s.accuracy) : "") + "," + std::to_string(s.counts.augment_calls) + "," +
           std::to_string(s.counts.edge_judgements) + "," + std::to_string(s.counts.fallbacks) + "," +
           std::to_string(s.counts.selected) + "," + std::to_string(s.counts.final_edges) + "," +
           std::to_string(s.counts.best_epoch) + "," + csv_field(s.error) + "\n";
  }
  out += "mean,," + csv_number(r.mean_accuracy()) + ",,,,,,,\n";
  out += "std,," + csv_number(r.std_accuracy()) + ",,,,,,,\n";
  return out;
}

std::string run_meta_json(const RunReport& r) {
  ordered_json j;
  ordered_json seeds = ordered_json::array();
  for (const auto& s : r.seeds) {
    ordered_json e;
    e["seed"] = s.seed;
    ordered_json stages = ordered_json::object();
    for (const auto& [name, secs] : s.stage_seconds) stages[name] = secs;
    e["stage_seconds"] = std::move(stages);
    e["fresh_calls"] = s.fresh_calls;
    e["cached_calls"] = s.cached_calls;
    e["reused_artifacts"] = s.reused_artifacts;
    seeds.push_back(std::move(e));
  }
  j["seeds"] = std::move(seeds);
  return j.dump(2) + "\n";
}

void write_run_outputs(const fs::path& dir, const RunReport& r, const std::string& format) {
  if (format != "json" && format != "csv") throw ConfigError("unknown report format '" + format + "'");
  fs::create_directories(dir);
  if (format == "json") write_file(dir / "report.json", report_json(r));
  else write_file(dir / "report.csv", report_csv(r));
  write_file(dir / "run_meta.json", run_meta_json(r));
}

void write_sweep_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "ratio,mean,std\n";
  for (const auto& r : runs) {
    out << format_decimal(r.sparsity) << ',' << csv_number(r.mean_accuracy()) << ',' << csv_number(r.std_accuracy())
        << '\n';
  }
}

void write_sweep_long_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "ratio,seed,accuracy\n";
  for (const auto& r : runs) {
    for (const auto& s : r.seeds) {
      out << format_decimal(r.sparsity) << ',' << s.seed << ',' << (s.ok() ? csv_number(s.accuracy) : "") << '\n';
    }
  }
}

std::string ablation_table(const std::vector<std::pair<std::string, RunReport>>& variants) {
  std::string out = "| variant | mean | std |\n|---|---|---|\n";
  for (const auto& [name, r] : variants) {
    out += "| " + name + " | " + fixed4(r.mean_accuracy()) + " | " + fixed4(r.std_accuracy()) + " |\n";
  }
  return out;
}

}  // namespace ultratag::pipeline
