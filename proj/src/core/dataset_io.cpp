#include "ultratag/core/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "ultratag/core/errors.hpp"

namespace ultratag {

using nlohmann::json;

namespace {

struct NodeRecord {
  std::optional<std::string> text;
  std::optional<ClassId> label;
  std::optional<std::string> split;
};

template <typename T>
T required(const json& rec, const char* key, std::size_t line_no) {
  if (!rec.contains(key)) {
    throw ParseError("line " + std::to_string(line_no) + ": missing field '" + key + "'");
  }
  try {
    return rec.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": bad field '" + key + "': " + e.what());
  }
}

std::int64_t required_id(const json& rec, const char* key, std::size_t line_no) {
  if (!rec.contains(key) || !rec.at(key).is_number_integer()) {
    throw ParseError("line " + std::to_string(line_no) + ": field '" + key + "' must be an integer");
  }
  const auto v = rec.at(key).get<std::int64_t>();
  if (v < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative id");
  return v;
}

}  // namespace

TextAttributedGraph read_dataset(std::istream& in) {
  TextAttributedGraph g;
  std::map<std::int64_t, NodeRecord> nodes;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  bool have_meta = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object()) throw ParseError("line " + std::to_string(line_no) + ": record is not an object");
    const auto type = required<std::string>(rec, "type", line_no);

    if (!have_meta) {
      if (type != "meta") throw ParseError("line " + std::to_string(line_no) + ": first record must be meta");
      g.class_names = required<std::vector<std::string>>(rec, "classes", line_no);
      have_meta = true;
      continue;
    }
    if (type == "node") {
      const auto id = required_id(rec, "id", line_no);
      NodeRecord node;
      if (rec.contains("text") && !rec["text"].is_null()) node.text = required<std::string>(rec, "text", line_no);
      if (rec.contains("label") && !rec["label"].is_null()) {
        const auto label = required_id(rec, "label", line_no);
        node.label = static_cast<ClassId>(label);
        if (static_cast<std::size_t>(label) >= g.class_names.size()) {
          throw ValidationError("line " + std::to_string(line_no) + ": unknown class " + std::to_string(label));
        }
      }
      if (rec.contains("split") && !rec["split"].is_null()) node.split = required<std::string>(rec, "split", line_no);
      if (!nodes.emplace(id, std::move(node)).second) {
        throw ValidationError("line " + std::to_string(line_no) + ": duplicate node id " + std::to_string(id));
      }
    } else if (type == "edge") {
      const auto u = required_id(rec, "u", line_no);
      const auto v = required_id(rec, "v", line_no);
      if (u == v) throw ValidationError("line " + std::to_string(line_no) + ": self-loop on node " + std::to_string(u));
      raw_edges.emplace_back(u, v);
    } else if (type == "meta") {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate meta record");
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown record type '" + type + "'");
    }
  }
  if (!have_meta) throw ParseError("dataset has no meta record");

  g.num_nodes = nodes.size();
  if (!nodes.empty() && static_cast<std::size_t>(nodes.rbegin()->first) != g.num_nodes - 1) {
    throw ValidationError("node ids are not dense in [0, " + std::to_string(g.num_nodes) + ")");
  }
  g.texts.reserve(g.num_nodes);
  g.labels.reserve(g.num_nodes);
  for (auto& [id, node] : nodes) {
    const auto nid = static_cast<NodeId>(id);
    g.texts.push_back(std::move(node.text));
    g.labels.push_back(node.label);
    if (!node.split) continue;
    if (*node.split == "train") g.splits.train.push_back(nid);
    else if (*node.split == "val") g.splits.val.push_back(nid);
    else if (*node.split == "test") g.splits.test.push_back(nid);
    else if (*node.split == "out") g.splits.out.push_back(nid);
    else throw ParseError("node " + std::to_string(id) + ": unknown split '" + *node.split + "'");
  }

  std::vector<Edge> edges;
  edges.reserve(raw_edges.size());
  for (auto [u, v] : raw_edges) {
    if (static_cast<std::size_t>(u) >= g.num_nodes || static_cast<std::size_t>(v) >= g.num_nodes) {
      throw ValidationError("dangling edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    edges.push_back(Edge::make(static_cast<NodeId>(u), static_cast<NodeId>(v)));
  }
  g.edges = EdgeSet(std::move(edges));
  g.validate();
  return g;
}

TextAttributedGraph load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path.string());
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const TextAttributedGraph& g) {
  out << json{{"type", "meta"}, {"classes", g.class_names}}.dump() << '\n';
  std::vector<const char*> split(g.num_nodes, nullptr);
  for (NodeId id : g.splits.train) split[id] = "train";
  for (NodeId id : g.splits.val) split[id] = "val";
  for (NodeId id : g.splits.test) split[id] = "test";
  for (NodeId id : g.splits.out) split[id] = "out";
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    json rec{{"type", "node"}, {"id", i}};
    rec["text"] = g.texts[i] ? json(*g.texts[i]) : json(nullptr);
    rec["label"] = g.labels[i] ? json(*g.labels[i]) : json(nullptr);
    rec["split"] = split[i] ? json(split[i]) : json(nullptr);
    out << rec.dump() << '\n';
  }
  for (const auto& e : g.edges) out << json{{"type", "edge"}, {"u", e.u}, {"v", e.v}}.dump() << '\n';
}

void save_dataset(const std::filesystem::path& path, const TextAttributedGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  write_dataset(out, g);
}

}  // namespace ultratag
