// ultratag: command-line front end for the UltraTAG-S pipeline.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ultratag/core/dataset_io.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/gnn/gradcheck.hpp"
#include "ultratag/pipeline/config.hpp"
#include "ultratag/pipeline/pipeline.hpp"
#include "ultratag/pipeline/report.hpp"
#include "ultratag/pipeline/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ultratag;
using namespace ultratag::pipeline;

namespace {

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::optional<std::string>> flags;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "Config file (key = value, [section] headers)");
  cmd->add_option("--set", o.sets, "Override as key=value (repeatable)");
  for (const auto& key : config_keys()) {
    auto& slot = o.flags[key];
    cmd->add_option_function<std::string>("--" + key, [&slot](const std::string& v) { slot = v; },
                                          "Override config key " + key)
        ->group("Config keys");
  }
}

PipelineConfig resolve(const CommonOptions& o) {
  PipelineConfig cfg;
  if (!o.config_file.empty()) load_config_file(cfg, o.config_file);
  for (const auto& [key, value] : o.flags) {
    if (value) apply_setting(cfg, key, *value);
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void print_summary(const std::string& label, const RunReport& r) {
  std::cout << label << ": mean=" << fixed4(r.mean_accuracy()) << " std=" << fixed4(r.std_accuracy()) << " ("
            << r.method << ", sparsity " << format_percent(r.sparsity) << ", " << r.seeds.size() << " seeds)\n";
  for (const auto& s : r.seeds) {
    if (!s.ok()) std::cerr << "  seed " << s.seed << " failed [" << to_string(s.failure) << "]: " << s.error << "\n";
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const CommonOptions& o, const std::string& format) {
  const auto cfg = resolve(o);
  const auto g = load_input(cfg);
  const auto report = run_pipeline(cfg, g);
  write_run_outputs(cfg.output_dir, report, format);
  write_text(cfg.output_dir / "config.resolved", canonical_config(cfg));
  print_summary("run", report);
  return report.exit_code();
}

int cmd_sweep(const CommonOptions& o, const std::vector<double>& ratios, const std::vector<std::string>& aggregations,
              const std::string& format) {
  const auto base = resolve(o);
  const auto g = load_input(base);
  std::vector<std::string> aggs = aggregations;
  if (aggs.empty()) aggs.emplace_back(augment::to_string(base.aggregation));
  int code = 0;
  for (const auto& agg : aggs) {
    auto cfg = base;
    apply_setting(cfg, "aggregation", agg);
    if (aggs.size() > 1) cfg.output_dir = base.output_dir / ("agg_" + agg);
    if (cfg.artifact_dir.empty()) cfg.artifact_dir = base.output_dir / "artifacts";
    const auto runs = run_sweep(cfg, g, ratios);
    for (const auto& r : runs) {
      write_run_outputs(cfg.output_dir / ("ratio_" + format_decimal(r.sparsity)), r, format);
      print_summary(agg + " @ " + format_percent(r.sparsity), r);
      if (code == 0) code = r.exit_code();
    }
    std::ostringstream wide, long_form;
    write_sweep_csv(wide, runs);
    write_sweep_long_csv(long_form, runs);
    write_text(cfg.output_dir / "sweep.csv", wide.str());
    write_text(cfg.output_dir / "sweep_long.csv", long_form.str());
  }
  return code;
}

int cmd_ablate(const CommonOptions& o, std::vector<std::string> without, bool print_table, const std::string& format) {
  const auto base = resolve(o);
  if (base.method != Method::UltraTag) throw ConfigError("ablate requires method = ultratag");
  const auto g = load_input(base);
  if (without.empty()) without = {"text_aug", "struct_aug", "struct_learn"};

  std::vector<std::pair<std::string, PipelineConfig>> variants{{"full", base}};
  for (const auto& module : without) {
    auto cfg = base;
    if (module == "text_aug") cfg.modules.text_aug = false;
    else if (module == "struct_aug") cfg.modules.struct_aug = false;
    else if (module == "struct_learn") cfg.modules.struct_learn = false;
    else throw ConfigError("--without expects text_aug, struct_aug or struct_learn, got '" + module + "'");
    variants.emplace_back("w/o " + module, cfg);
  }

  auto shared = base;
  if (shared.artifact_dir.empty()) shared.artifact_dir = base.output_dir / "artifacts";
  if (shared.llm.cache_dir.empty()) shared.llm.cache_dir = shared.artifact_dir / "llm_cache";
  llm::LlmGateway gateway(shared.llm);

  int code = 0;
  std::vector<std::pair<std::string, RunReport>> results;
  for (auto& [name, cfg] : variants) {
    cfg.artifact_dir = shared.artifact_dir;
    cfg.llm.cache_dir = shared.llm.cache_dir;
    std::string dir = name;
    if (dir.rfind("w/o ", 0) == 0) dir = "without_" + dir.substr(4);
    cfg.output_dir = base.output_dir / dir;
    auto report = run_pipeline(cfg, g, gateway);
    write_run_outputs(cfg.output_dir, report, format);
    print_summary(name, report);
    if (code == 0) code = report.exit_code();
    results.emplace_back(name, std::move(report));
  }
  const auto table = ablation_table(results);
  write_text(base.output_dir / "ablation.md", table);
  if (print_table) std::cout << table;
  return code;
}

int cmd_synth(const CommonOptions& o, const std::string& out) {
  const auto cfg = resolve(o);
  const auto g = gen_synthetic(cfg.synthetic);
  const fs::path path(out);
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  save_dataset(path, g);
  std::cout << "wrote " << g.num_nodes << " nodes, " << g.edges.size() << " edges, " << g.num_classes()
            << " classes to " << path.string() << "\n";
  return 0;
}

int cmd_gradcheck(std::size_t nodes, double eps, double tol) {
  const auto fixture = gnn::make_gradcheck_fixture(nodes);
  const auto results = gnn::run_gradcheck_suite(fixture, 8, eps);
  bool ok = true;
  for (const auto& r : results) {
    const bool pass = r.max_rel_error <= tol;
    ok = ok && pass;
    std::cout << (pass ? "ok   " : "FAIL ") << r.name << ": " << r.parameters << " params, max rel err "
              << r.max_rel_error << ", " << r.seconds << " s\n";
  }
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UltraTAG-S node classification on sparse text-attributed graphs"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, ablate_opts, synth_opts;
  std::string run_format = "json", sweep_format = "json", ablate_format = "json";

  auto* run = app.add_subcommand("run", "Run one configuration over all seeds");
  add_common(run, run_opts);
  run->add_option("--format", run_format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::vector<double> ratios;
  std::vector<std::string> aggregations;
  auto* sweep = app.add_subcommand("sweep", "Run several sparsity ratios");
  add_common(sweep, sweep_opts);
  sweep->add_option("--ratios", ratios, "Comma-separated sparsity ratios")->delimiter(',')->required();
  sweep->add_option("--aggregations", aggregations, "Comma-separated aggregation modes")->delimiter(',');
  sweep->add_option("--format", sweep_format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> without;
  bool table = false;
  auto* ablate = app.add_subcommand("ablate", "Compare the full method with module ablations");
  add_common(ablate, ablate_opts);
  ablate->add_option("--without", without, "Module to disable (repeatable); default all three")
      ->check(CLI::IsMember({"text_aug", "struct_aug", "struct_learn"}));
  ablate->add_flag("--table", table, "Print the ablation table");
  ablate->add_option("--format", ablate_format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::string synth_out = "data/synthetic.jsonl";
  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-partition dataset");
  add_common(synth, synth_opts);
  synth->add_option("--out", synth_out, "Output JSONL path");

  std::size_t gc_nodes = 12;
  double gc_eps = 1e-5, gc_tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  gradcheck->add_option("--nodes", gc_nodes, "Fixture size");
  gradcheck->add_option("--eps", gc_eps, "Finite-difference step");
  gradcheck->add_option("--tol", gc_tol, "Maximum relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_opts, run_format);
    if (*sweep) return cmd_sweep(sweep_opts, ratios, aggregations, sweep_format);
    if (*ablate) return cmd_ablate(ablate_opts, without, table, ablate_format);
    if (*synth) return cmd_synth(synth_opts, synth_out);
    if (*gradcheck) return cmd_gradcheck(gc_nodes, gc_eps, gc_tol);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TransportError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
