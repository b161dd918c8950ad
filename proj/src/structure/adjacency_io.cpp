#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/structure/struct_augment.hpp"

namespace ultratag::structure {

void write_edge_list(std::ostream& out, const EdgeSet& edges) {
  for (const auto& e : edges) out << e.u << ' ' << e.v << '\n';
}

EdgeSet read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    long long u = -1, v = -1;
    if (!(ss >> u >> v) || u < 0 || v < 0) throw ParseError("edge list line " + std::to_string(line_no) + ": expected 'u v'");
    edges.push_back(Edge::make(static_cast<NodeId>(u), static_cast<NodeId>(v)));
  }
  return EdgeSet(std::move(edges));
}

void write_confidences(std::ostream& out, const ConfidenceMap& confidences) {
  out << "u,v,score,source\n";
  for (const auto& [e, c] : confidences) {
    out << e.u << ',' << e.v << ',' << format_decimal(c.score) << ','
        << (c.source == ConfidenceSource::Llm ? "llm" : "fallback") << '\n';
  }
}

ConfidenceMap read_confidences(std::istream& in) {
  ConfidenceMap out;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "u,v,score,source") throw ParseError("confidences: bad header");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string u, v, score, source;
    if (!std::getline(ss, u, ',') || !std::getline(ss, v, ',') || !std::getline(ss, score, ',') ||
        !std::getline(ss, source)) {
      throw ParseError("confidences: malformed row '" + line + "'");
    }
    try {
      const auto e = Edge::make(static_cast<NodeId>(std::stoul(u)), static_cast<NodeId>(std::stoul(v)));
      const auto src = std::string(trim(source));
      if (src != "llm" && src != "fallback") throw ParseError("confidences: bad source '" + src + "'");
      out[e] = {std::stod(score), src == "llm" ? ConfidenceSource::Llm : ConfidenceSource::Fallback};
    } catch (const std::logic_error&) {
      throw ParseError("confidences: malformed row '" + line + "'");
    }
  }
  return out;
}

namespace {

std::filesystem::path file(const std::filesystem::path& dir, std::string_view prefix, std::string_view suffix) {
  return dir / (std::string(prefix) + std::string(suffix));
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_stage(const std::filesystem::path& dir, std::string_view prefix, const AdjacencyStage& stage) {
  std::filesystem::create_directories(dir);
  write_file(file(dir, prefix, ".base.edges"), [&](std::ostream& o) { write_edge_list(o, stage.base); });
  write_file(file(dir, prefix, ".virtual.edges"), [&](std::ostream& o) { write_edge_list(o, stage.virtual_edges); });
  write_file(file(dir, prefix, ".reconfigured.edges"), [&](std::ostream& o) { write_edge_list(o, stage.reconfigured); });
  write_file(file(dir, prefix, ".selected.txt"), [&](std::ostream& o) {
    for (NodeId id : stage.selected) o << id << '\n';
  });
  write_file(file(dir, prefix, ".confidences.csv"), [&](std::ostream& o) { write_confidences(o, stage.confidences); });
}

AdjacencyStage load_stage(const std::filesystem::path& dir, std::string_view prefix) {
  AdjacencyStage stage;
  {
    auto in = open_file(file(dir, prefix, ".base.edges"));
    stage.base = read_edge_list(in);
  }
  {
    auto in = open_file(file(dir, prefix, ".virtual.edges"));
    stage.virtual_edges = read_edge_list(in);
  }
  {
    auto in = open_file(file(dir, prefix, ".reconfigured.edges"));
    stage.reconfigured = read_edge_list(in);
  }
  {
    auto in = open_file(file(dir, prefix, ".selected.txt"));
    long long id;
    while (in >> id) {
      if (id < 0) throw ParseError("selected ids must be non-negative");
      stage.selected.push_back(static_cast<NodeId>(id));
    }
  }
  {
    auto in = open_file(file(dir, prefix, ".confidences.csv"));
    stage.confidences = read_confidences(in);
  }
  return stage;
}

bool stage_exists(const std::filesystem::path& dir, std::string_view prefix) {
  for (auto suffix : {".base.edges", ".virtual.edges", ".reconfigured.edges", ".selected.txt", ".confidences.csv"}) {
    if (!std::filesystem::exists(file(dir, prefix, suffix))) return false;
  }
  return true;
}

}  // namespace ultratag::structure
