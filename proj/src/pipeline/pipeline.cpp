#include "ultratag/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ultratag/augment/text_augment.hpp"
#include "ultratag/core/dataset_io.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/core/hash.hpp"
#include "ultratag/core/sparsify.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/embed/embedder.hpp"
#include "ultratag/gnn/checkpoint.hpp"
#include "ultratag/gnn/dual_gnn.hpp"
#include "ultratag/gnn/gcn.hpp"
#include "ultratag/llm/prompt.hpp"
#include "ultratag/pipeline/synthetic.hpp"
#include "ultratag/structure/struct_augment.hpp"

namespace ultratag::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::None: return "ok";
    case FailureKind::Transport: return "transport";
    case FailureKind::Numeric: return "numeric";
    case FailureKind::Data: return "data";
    case FailureKind::Internal: return "internal";
  }
  return "?";
}

double RunReport::mean_accuracy() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : seeds) {
    if (s.ok()) {
      sum += s.accuracy;
      ++n;
    }
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double RunReport::std_accuracy() const {
  const double mean = mean_accuracy();
  if (std::isnan(mean)) return mean;
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& s : seeds) {
    if (s.ok()) {
      ss += (s.accuracy - mean) * (s.accuracy - mean);
      ++n;
    }
  }
  return n < 2 ? 0.0 : std::sqrt(ss / static_cast<double>(n - 1));
}

bool RunReport::complete() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.ok(); });
}

int RunReport::exit_code() const {
  for (const auto& s : seeds) {
    switch (s.failure) {
      case FailureKind::None: continue;
      case FailureKind::Transport: return 3;
      case FailureKind::Numeric: return 4;
      default: return 1;
    }
  }
  return 0;
}

TextAttributedGraph load_input(const PipelineConfig& cfg) {
  if (cfg.dataset.empty()) return gen_synthetic(cfg.synthetic);
  if (!fs::exists(cfg.dataset)) throw ConfigError("dataset not found: " + cfg.dataset.string());
  return load_dataset(cfg.dataset);
}

std::string dataset_description(const PipelineConfig& cfg, const TextAttributedGraph& g) {
  if (!cfg.dataset_description.empty()) return cfg.dataset_description;
  if (!cfg.dataset_name.empty()) {
    if (auto d = llm::builtin_dataset_description(cfg.dataset_name)) return *d;
  }
  return llm::generic_dataset_description(g.class_names);
}

namespace {

using Clock = std::chrono::steady_clock;

class StageClock {
 public:
  explicit StageClock(SeedResult& r) : r_(r), last_(Clock::now()) {}
  void lap(const char* stage) {
    const auto now = Clock::now();
    r_.stage_seconds.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  SeedResult& r_;
  Clock::time_point last_;
};

std::string fingerprint(const TextAttributedGraph& g) {
  std::ostringstream os;
  write_dataset(os, g);
  return sha256_hex(os.str());
}

std::string artifact_name(const FieldHasher& h) { return h.hex().substr(0, 24); }

void write_text_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void add_embedding_fields(FieldHasher& h, const embed::EmbeddingProviderConfig& e) {
  h.add(embed::to_string(e.kind));
  if (e.kind == embed::EmbeddingProviderKind::Offline) {
    h.add(static_cast<std::uint64_t>(e.dim));
  } else {
    h.add(e.endpoint).add(e.model);
  }
}

struct RunContext {
  const PipelineConfig& cfg;
  const TextAttributedGraph& graph;
  std::string data_fp;
  std::string description;
  fs::path artifacts;
  llm::LlmGateway& gateway;
};

embed::EmbeddingMatrix embed_with_artifact(const RunContext& ctx, const std::vector<std::string>& texts,
                                           const FieldHasher& key, SeedResult& r) {
  const fs::path path = ctx.artifacts / ("emb_" + artifact_name(key) + ".bin");
  if (fs::exists(path)) {
    auto m = embed::load_embeddings(path);
    if (m.rows() == texts.size()) {
      r.reused_artifacts.push_back(path.filename().string());
      return m;
    }
  }
  auto m = embed::embed(texts, ctx.cfg.embedding);
  fs::create_directories(ctx.artifacts);
  embed::save_embeddings(path, m);
  return m;
}

std::vector<augment::AugmentedNodeText> augment_with_artifact(const RunContext& ctx, const TextAttributedGraph& gs,
                                                              const std::vector<std::string>& propagated,
                                                              const FieldHasher& key, SeedResult& r) {
  const fs::path path = ctx.artifacts / ("aug_" + artifact_name(key) + ".jsonl");
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    auto nodes = augment::read_augmented(in);
    if (nodes.size() == gs.num_nodes) {
      r.reused_artifacts.push_back(path.filename().string());
      return nodes;
    }
  }
  auto nodes = augment::augment(gs, propagated, ctx.gateway, ctx.description);
  std::ostringstream os;
  augment::write_augmented(os, nodes);
  write_text_atomic(path, os.str());
  return nodes;
}

void write_seed_outputs(const fs::path& dir, const std::vector<ClassId>& preds,
                        const std::vector<gnn::EpochRecord>& history, const gnn::Checkpoint& ckpt) {
  fs::create_directories(dir);
  std::ostringstream hist;
  gnn::write_history_csv(hist, history);
  write_text_atomic(dir / "history.csv", hist.str());
  std::string pred_csv = "node,prediction\n";
  for (std::size_t i = 0; i < preds.size(); ++i) pred_csv += std::to_string(i) + "," + std::to_string(preds[i]) + "\n";
  write_text_atomic(dir / "predictions.csv", pred_csv);
  gnn::save_checkpoint(dir / "model.ckpt", ckpt);
}

struct Trained {
  std::vector<ClassId> predictions;
  std::vector<gnn::EpochRecord> history;
  gnn::Checkpoint checkpoint;
};

Trained train_plain(const DenseMatrix& x, const EdgeSet& edges, bool use_graph, const TextAttributedGraph& gs,
                    const gnn::TrainConfig& tc) {
  Trained t;
  const auto n = static_cast<Eigen::Index>(gs.num_nodes);
  gnn::GcnTrainResult res = use_graph ? gnn::train_gcn(x, edges, gs.labels, gs.splits, gs.num_classes(), tc)
                                      : gnn::train_mlp(x, gs.labels, gs.splits, gs.num_classes(), tc);
  const DenseMatrix a_hat = use_graph ? gnn::sym_normalize(edges, gs.num_nodes) : DenseMatrix(DenseMatrix::Identity(n, n));
  t.predictions = gnn::predict(res.model.params, x, a_hat);
  t.history = std::move(res.history);
  t.checkpoint = {res.model.seed, res.model.best_epoch, {res.model.params}};
  return t;
}

Trained train_joint(const DenseMatrix& x, const structure::AdjacencyStage& stage, const TextAttributedGraph& gs,
                    const gnn::TrainConfig& tc) {
  Trained t;
  auto res = gnn::train_dual(x, stage.reconfigured, stage.selected, gs.labels, gs.splits, gs.num_classes(), tc);
  const gnn::DualObjective objective(x, stage.reconfigured, stage.selected, tc.sim_threshold);
  t.predictions = gnn::predict(res.model, objective);
  t.history = std::move(res.history);
  t.checkpoint = {res.model.seed, res.model.best_epoch, {res.model.gnn1, res.model.gnn2}};
  return t;
}

void run_seed_body(const RunContext& ctx, SeedResult& r) {
  const auto& cfg = ctx.cfg;
  StageClock clock(r);
  const TextAttributedGraph gs = sparsify(ctx.graph, {cfg.sparsity, r.seed});
  clock.lap("sparsify");

  gnn::TrainConfig tc = cfg.train;
  tc.seed = r.seed;
  Trained trained;

  if (cfg.method != Method::UltraTag) {
    std::vector<std::string> raw(gs.num_nodes);
    for (std::size_t i = 0; i < gs.num_nodes; ++i) raw[i] = gs.texts[i].value_or("");
    FieldHasher key;
    key.add("raw-embedding").add(ctx.data_fp).add(cfg.sparsity).add(r.seed);
    add_embedding_fields(key, cfg.embedding);
    const auto x = embed_with_artifact(ctx, raw, key, r);
    clock.lap("embed");
    r.counts.base_edges = r.counts.final_edges = gs.edges.size();
    trained = train_plain(x.values, gs.edges, cfg.method == Method::Gcn, gs, tc);
    clock.lap("train");
  } else {
    const auto propagated = augment::propagate_texts(gs, cfg.char_budget);
    clock.lap("propagate");

    FieldHasher aug_key;
    aug_key.add("augment").add(ctx.data_fp).add(cfg.sparsity).add(r.seed)
        .add(static_cast<std::uint64_t>(cfg.char_budget)).add(ctx.description)
        .add(llm::to_string(ctx.gateway.provider_kind())).add(ctx.gateway.model());
    std::vector<augment::AugmentedNodeText> aug;
    if (cfg.modules.text_aug) {
      aug = augment_with_artifact(ctx, gs, propagated, aug_key, r);
      r.counts.augment_calls = augment::augment_call_count(propagated);
    } else {
      aug.resize(gs.num_nodes);
      for (std::size_t i = 0; i < gs.num_nodes; ++i) {
        aug[i].original = gs.texts[i].value_or("");
        aug[i].propagated = propagated[i];
      }
    }
    const auto mode = cfg.modules.text_aug ? cfg.aggregation : augment::AggregationMode::OT;
    std::vector<std::string> aggregated(gs.num_nodes);
    std::vector<std::optional<ClassId>> soft(gs.num_nodes);
    std::vector<std::string> soft_names(gs.num_nodes);
    for (std::size_t i = 0; i < gs.num_nodes; ++i) {
      aggregated[i] = augment::aggregate(aug[i], mode, gs.class_names);
      aug[i].aggregated = aggregated[i];
      soft[i] = aug[i].soft_label;
      soft_names[i] = augment::soft_label_name(soft[i], gs.class_names);
    }
    clock.lap("augment");

    FieldHasher emb_key = aug_key;
    emb_key.add("embedding").add(static_cast<std::uint64_t>(cfg.modules.text_aug)).add(augment::to_string(mode));
    add_embedding_fields(emb_key, cfg.embedding);
    const auto x = embed_with_artifact(ctx, aggregated, emb_key, r);
    clock.lap("embed");

    structure::AdjacencyStage stage;
    if (cfg.modules.struct_aug) {
      FieldHasher adj_key = emb_key;
      adj_key.add("structure").add(cfg.tau1).add(cfg.tau2).add(cfg.k_fraction).add(cfg.pagerank_damping);
      const std::string prefix = "adj_" + artifact_name(adj_key);
      if (structure::stage_exists(ctx.artifacts, prefix)) {
        stage = structure::load_stage(ctx.artifacts, prefix);
        r.reused_artifacts.push_back(prefix);
      } else {
        stage.base = gs.edges;
        stage.virtual_edges = structure::virtual_edges(x.values, soft, gs.edges, cfg.tau1);
        const auto pr = structure::pagerank(stage.virtual_edges, gs.num_nodes, cfg.pagerank_damping);
        const auto k = structure::selection_size(gs.splits.train.size(), gs.num_nodes, cfg.k_fraction);
        stage.selected = structure::select_top_k(pr.scores, k);
        auto rc = structure::reconfigure_edges(stage.selected, aggregated, soft_names, gs.edges, cfg.tau2,
                                               ctx.gateway, ctx.description);
        stage.reconfigured = std::move(rc.edges);
        stage.confidences = std::move(rc.confidences);
        structure::save_stage(ctx.artifacts, prefix, stage);
      }
      r.counts.edge_judgements = stage.confidences.size();
      r.counts.fallbacks = static_cast<std::size_t>(
          std::count_if(stage.confidences.begin(), stage.confidences.end(),
                        [](const auto& kv) { return kv.second.source == structure::ConfidenceSource::Fallback; }));
    } else {
      stage.base = stage.virtual_edges = stage.reconfigured = gs.edges;
    }
    r.counts.base_edges = stage.base.size();
    r.counts.virtual_edges = stage.virtual_edges.size();
    r.counts.final_edges = stage.reconfigured.size();
    r.counts.selected = stage.selected.size();
    clock.lap("structure");

    trained = cfg.modules.struct_learn ? train_joint(x.values, stage, gs, tc)
                                       : train_plain(x.values, stage.reconfigured, true, gs, tc);
    clock.lap("train");
  }

  r.counts.best_epoch = trained.checkpoint.epoch;
  r.accuracy = accuracy(trained.predictions, gs, gs.splits.test);
  write_seed_outputs(cfg.output_dir / ("seed_" + std::to_string(r.seed)), trained.predictions, trained.history,
                     trained.checkpoint);
  clock.lap("evaluate");
}

SeedResult run_seed(const RunContext& ctx, std::uint64_t seed) {
  SeedResult r;
  r.seed = seed;
  const auto before = ctx.gateway.stats();
  try {
    run_seed_body(ctx, r);
  } catch (const ConfigError&) {
    throw;
  } catch (const TransportError& e) {
    r.failure = FailureKind::Transport;
    r.error = e.what();
  } catch (const NumericError& e) {
    r.failure = FailureKind::Numeric;
    r.error = e.what();
  } catch (const ParseError& e) {
    r.failure = FailureKind::Data;
    r.error = e.what();
  } catch (const ValidationError& e) {
    r.failure = FailureKind::Data;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.failure = FailureKind::Internal;
    r.error = e.what();
  }
  const auto after = ctx.gateway.stats();
  r.fresh_calls = after.fresh - before.fresh;
  r.cached_calls = after.cached - before.cached;
  return r;
}

fs::path artifact_root(const PipelineConfig& cfg) {
  return cfg.artifact_dir.empty() ? cfg.output_dir / "artifacts" : cfg.artifact_dir;
}

llm::ProviderConfig gateway_config(const PipelineConfig& cfg) {
  auto p = cfg.llm;
  if (p.cache_dir.empty()) p.cache_dir = artifact_root(cfg) / "llm_cache";
  return p;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg, const TextAttributedGraph& g, llm::LlmGateway& gateway) {
  cfg.validate();
  g.validate();
  if (g.num_classes() < 2) throw ConfigError("dataset needs at least two classes");

  RunContext ctx{cfg, g, fingerprint(g), dataset_description(cfg, g), artifact_root(cfg), gateway};
  RunReport report;
  report.dataset = cfg.dataset.empty() ? "synthetic" : (cfg.dataset_name.empty() ? cfg.dataset.stem().string() : cfg.dataset_name);
  report.method = std::string(to_string(cfg.method));
  report.sparsity = cfg.sparsity;
  report.aggregation = std::string(augment::to_string(cfg.modules.text_aug ? cfg.aggregation : augment::AggregationMode::OT));
  report.modules = cfg.modules;
  for (const auto seed : cfg.seeds) report.seeds.push_back(run_seed(ctx, seed));
  return report;
}

RunReport run_pipeline(const PipelineConfig& cfg, const TextAttributedGraph& g) {
  cfg.validate();
  llm::LlmGateway gateway(gateway_config(cfg));
  return run_pipeline(cfg, g, gateway);
}

std::vector<RunReport> run_sweep(const PipelineConfig& cfg, const TextAttributedGraph& g,
                                 const std::vector<double>& ratios) {
  if (ratios.empty()) throw ConfigError("sweep needs at least one ratio");
  PipelineConfig base = cfg;
  base.artifact_dir = artifact_root(cfg);
  base.llm = gateway_config(cfg);
  llm::LlmGateway gateway(base.llm);
  std::vector<RunReport> out;
  for (const double ratio : ratios) {
    PipelineConfig c = base;
    c.sparsity = ratio;
    c.output_dir = cfg.output_dir / ("ratio_" + format_decimal(ratio));
    out.push_back(run_pipeline(c, g, gateway));
  }
  return out;
}

}  // namespace ultratag::pipeline
