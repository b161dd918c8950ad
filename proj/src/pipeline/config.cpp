#include "ultratag/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/text.hpp"

namespace ultratag::pipeline {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::UltraTag: return "ultratag";
    case Method::Gcn: return "gcn";
    case Method::Mlp: return "mlp";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "ultratag") return Method::UltraTag;
  if (name == "gcn") return Method::Gcn;
  if (name == "mlp") return Method::Mlp;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected ultratag, gcn or mlp)");
}

namespace {

double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not a number");
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not a non-negative integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  const auto s = to_lower(trim(v));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not a boolean");
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Setting {
  std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename Field>
Setting double_setting(Field field) {
  return {[field](PipelineConfig& c, std::string_view k, std::string_view v) { field(c) = parse_double(k, v); },
          [field](const PipelineConfig& c) { return format_decimal(field(const_cast<PipelineConfig&>(c))); }};
}

template <typename T, typename Field>
Setting uint_setting(Field field) {
  return {[field](PipelineConfig& c, std::string_view k, std::string_view v) { field(c) = static_cast<T>(parse_uint(k, v)); },
          [field](const PipelineConfig& c) { return std::to_string(field(const_cast<PipelineConfig&>(c))); }};
}

template <typename Field>
Setting bool_setting(Field field) {
  return {[field](PipelineConfig& c, std::string_view k, std::string_view v) { field(c) = parse_bool(k, v); },
          [field](const PipelineConfig& c) { return fmt_bool(field(const_cast<PipelineConfig&>(c))); }};
}

template <typename Field>
Setting string_setting(Field field) {
  return {[field](PipelineConfig& c, std::string_view, std::string_view v) { field(c) = std::string(trim(v)); },
          [field](const PipelineConfig& c) { return std::string(field(const_cast<PipelineConfig&>(c))); }};
}


const std::map<std::string, Setting, std::less<>>& settings() {
  static const std::map<std::string, Setting, std::less<>> table = [] {
    std::map<std::string, Setting, std::less<>> t;
    t["dataset"] = {[](PipelineConfig& c, std::string_view, std::string_view v) { c.dataset = std::string(trim(v)); },
                    [](const PipelineConfig& c) { return c.dataset.string(); }};
    t["dataset_name"] = string_setting([](PipelineConfig& c) -> std::string& { return c.dataset_name; });
    t["dataset_description"] = string_setting([](PipelineConfig& c) -> std::string& { return c.dataset_description; });
    t["method"] = {[](PipelineConfig& c, std::string_view, std::string_view v) { c.method = parse_method(trim(v)); },
                   [](const PipelineConfig& c) { return std::string(to_string(c.method)); }};
    t["sparsity"] = double_setting([](PipelineConfig& c) -> double& { return c.sparsity; });
    t["seeds"] = {[](PipelineConfig& c, std::string_view k, std::string_view v) {
                    c.seeds.clear();
                    std::string s(v);
                    std::istringstream ss(s);
                    std::string part;
                    while (std::getline(ss, part, ',')) {
                      if (!trim(part).empty()) c.seeds.push_back(parse_uint(k, part));
                    }
                  },
                  [](const PipelineConfig& c) {
                    std::string out;
                    for (std::size_t i = 0; i < c.seeds.size(); ++i) out += (i ? "," : "") + std::to_string(c.seeds[i]);
                    return out;
                  }};
    t["tau1"] = double_setting([](PipelineConfig& c) -> double& { return c.tau1; });
    t["tau2"] = double_setting([](PipelineConfig& c) -> double& { return c.tau2; });
    t["k_fraction"] = double_setting([](PipelineConfig& c) -> double& { return c.k_fraction; });
    t["pagerank_damping"] = double_setting([](PipelineConfig& c) -> double& { return c.pagerank_damping; });
    t["char_budget"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.char_budget; });
    t["aggregation"] = {[](PipelineConfig& c, std::string_view, std::string_view v) {
                          try {
                            c.aggregation = augment::parse_aggregation_mode(trim(v));
                          } catch (const std::invalid_argument& e) {
                            throw ConfigError(e.what());
                          }
                        },
                        [](const PipelineConfig& c) { return std::string(augment::to_string(c.aggregation)); }};
    t["output_dir"] = {[](PipelineConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(trim(v)); },
                       [](const PipelineConfig& c) { return c.output_dir.string(); }};
    t["artifact_dir"] = {[](PipelineConfig& c, std::string_view, std::string_view v) { c.artifact_dir = std::string(trim(v)); },
                         [](const PipelineConfig& c) { return c.artifact_dir.string(); }};

    t["modules.text_aug"] = bool_setting([](PipelineConfig& c) -> bool& { return c.modules.text_aug; });
    t["modules.struct_aug"] = bool_setting([](PipelineConfig& c) -> bool& { return c.modules.struct_aug; });
    t["modules.struct_learn"] = bool_setting([](PipelineConfig& c) -> bool& { return c.modules.struct_learn; });

    t["synthetic.classes"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.classes; });
    t["synthetic.nodes_per_class"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.nodes_per_class; });
    t["synthetic.p_intra"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.p_intra; });
    t["synthetic.p_inter"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.p_inter; });
    t["synthetic.vocab_per_class"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.vocab_per_class; });
    t["synthetic.noise_vocab"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.noise_vocab; });
    t["synthetic.words_per_node"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.words_per_node; });
    t["synthetic.words_per_sentence"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.synthetic.words_per_sentence; });
    t["synthetic.noise_fraction"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.noise_fraction; });
    t["synthetic.train_fraction"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.train_fraction; });
    t["synthetic.val_fraction"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.val_fraction; });
    t["synthetic.test_fraction"] = double_setting([](PipelineConfig& c) -> double& { return c.synthetic.test_fraction; });
    t["synthetic.seed"] = uint_setting<std::uint64_t>([](PipelineConfig& c) -> std::uint64_t& { return c.synthetic.seed; });

    t["llm.provider"] = {[](PipelineConfig& c, std::string_view, std::string_view v) {
                           try {
                             c.llm.kind = llm::parse_provider_kind(trim(v));
                           } catch (const std::invalid_argument& e) {
                             throw ConfigError(e.what());
                           }
                         },
                         [](const PipelineConfig& c) { return std::string(llm::to_string(c.llm.kind)); }};
    t["llm.endpoint"] = string_setting([](PipelineConfig& c) -> std::string& { return c.llm.endpoint; });
    t["llm.model"] = string_setting([](PipelineConfig& c) -> std::string& { return c.llm.model; });
    t["llm.max_retries"] = uint_setting<int>([](PipelineConfig& c) -> int& { return c.llm.max_retries; });
    t["llm.timeout_ms"] = {[](PipelineConfig& c, std::string_view k, std::string_view v) { c.llm.timeout = std::chrono::milliseconds(parse_uint(k, v)); },
                           [](const PipelineConfig& c) { return std::to_string(c.llm.timeout.count()); }};
    t["llm.backoff_ms"] = {[](PipelineConfig& c, std::string_view k, std::string_view v) { c.llm.backoff = std::chrono::milliseconds(parse_uint(k, v)); },
                           [](const PipelineConfig& c) { return std::to_string(c.llm.backoff.count()); }};
    t["llm.cache_dir"] = {[](PipelineConfig& c, std::string_view, std::string_view v) { c.llm.cache_dir = std::string(trim(v)); },
                          [](const PipelineConfig& c) { return c.llm.cache_dir.string(); }};
    t["llm.workers"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.llm.workers; });
    t["llm.api_key_env"] = string_setting([](PipelineConfig& c) -> std::string& { return c.llm.api_key_env; });

    t["embed.provider"] = {[](PipelineConfig& c, std::string_view, std::string_view v) {
                             try {
                               c.embedding.kind = embed::parse_embedding_provider_kind(trim(v));
                             } catch (const std::invalid_argument& e) {
                               throw ConfigError(e.what());
                             }
                           },
                           [](const PipelineConfig& c) { return std::string(embed::to_string(c.embedding.kind)); }};
    t["embed.dim"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.embedding.dim; });
    t["embed.endpoint"] = string_setting([](PipelineConfig& c) -> std::string& { return c.embedding.endpoint; });
    t["embed.model"] = string_setting([](PipelineConfig& c) -> std::string& { return c.embedding.model; });
    t["embed.batch_size"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.embedding.batch_size; });
    t["embed.workers"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.embedding.workers; });
    t["embed.max_retries"] = uint_setting<int>([](PipelineConfig& c) -> int& { return c.embedding.max_retries; });
    t["embed.timeout_ms"] = {[](PipelineConfig& c, std::string_view k, std::string_view v) { c.embedding.timeout = std::chrono::milliseconds(parse_uint(k, v)); },
                             [](const PipelineConfig& c) { return std::to_string(c.embedding.timeout.count()); }};
    t["embed.api_key_env"] = string_setting([](PipelineConfig& c) -> std::string& { return c.embedding.api_key_env; });

    t["train.lr"] = double_setting([](PipelineConfig& c) -> double& { return c.train.learning_rate; });
    t["train.weight_decay"] = double_setting([](PipelineConfig& c) -> double& { return c.train.weight_decay; });
    t["train.dropout"] = double_setting([](PipelineConfig& c) -> double& { return c.train.dropout; });
    t["train.epochs"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.train.epochs; });
    t["train.hidden"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.train.hidden; });
    t["train.layers"] = uint_setting<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.train.layers; });
    t["train.sim_threshold"] = double_setting([](PipelineConfig& c) -> double& { return c.train.sim_threshold; });
    t["train.float_mode"] = string_setting([](PipelineConfig& c) -> std::string& { return c.train.float_mode; });
    return t;
  }();
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(sparsity)) throw ConfigError("sparsity must be in [0, 1]");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(tau1 >= -1.0 && tau1 <= 2.0)) throw ConfigError("tau1 out of range");
  if (!unit(tau2)) throw ConfigError("tau2 must be in [0, 1]");
  if (!(k_fraction > 0.0 && k_fraction <= 1.0)) throw ConfigError("k_fraction must be in (0, 1]");
  if (!(pagerank_damping > 0.0 && pagerank_damping < 1.0)) throw ConfigError("pagerank_damping must be in (0, 1)");
  if (char_budget == 0) throw ConfigError("char_budget must be positive");
  if (embedding.kind == embed::EmbeddingProviderKind::Offline && embedding.dim < 2) throw ConfigError("embed.dim must be >= 2");
  if (llm.workers == 0 || embedding.workers == 0) throw ConfigError("worker counts must be positive");
  train.validate();
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = settings();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second.set(cfg, key, value);
}

std::string get_setting(const PipelineConfig& cfg, std::string_view key) {
  const auto& table = settings();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second.get(cfg);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : settings()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    apply_setting(cfg, section.empty() ? std::string(key) : section + "." + std::string(key), value);
  }
}

void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

std::string canonical_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& key : config_keys()) out += key + "=" + get_setting(cfg, key) + "\n";
  return out;
}

}  // namespace ultratag::pipeline
