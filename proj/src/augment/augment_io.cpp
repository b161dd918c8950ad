#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "ultratag/augment/text_augment.hpp"
#include "ultratag/core/errors.hpp"

namespace ultratag::augment {

using nlohmann::json;

void write_augmented(std::ostream& out, const std::vector<AugmentedNodeText>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    json rec{{"id", i},
             {"original", n.original ? json(*n.original) : json(nullptr)},
             {"propagated", n.propagated},
             {"summary", n.summary},
             {"keywords", n.keywords},
             {"soft_label", n.soft_label ? json(*n.soft_label) : json(nullptr)},
             {"soft_label_raw", n.soft_label_raw}};
    out << rec.dump() << '\n';
  }
}

std::vector<AugmentedNodeText> read_augmented(std::istream& in) {
  std::vector<AugmentedNodeText> nodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto rec = json::parse(line);
      if (rec.at("id").get<std::size_t>() != nodes.size()) throw ParseError("augmented texts out of order");
      AugmentedNodeText n;
      if (!rec.at("original").is_null()) n.original = rec["original"].get<std::string>();
      n.propagated = rec.at("propagated").get<std::string>();
      n.summary = rec.at("summary").get<std::string>();
      n.keywords = rec.at("keywords").get<std::string>();
      if (!rec.at("soft_label").is_null()) n.soft_label = rec["soft_label"].get<ClassId>();
      n.soft_label_raw = rec.value("soft_label_raw", std::string());
      nodes.push_back(std::move(n));
    } catch (const json::exception& e) {
      throw ParseError(std::string("augmented texts: ") + e.what());
    }
  }
  return nodes;
}

}  // namespace ultratag::augment
