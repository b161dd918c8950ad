#pragma once

#include <filesystem>
#include <iosfwd>

#include "ultratag/core/graph.hpp"

namespace ultratag {

// JSONL layout, one record per line:
//   {"type":"meta","classes":[...]}                      (first record)
//   {"type":"node","id":0,"text":"..."|null,"label":0|null,"split":"train"|"val"|"test"|"out"|null}
//   {"type":"edge","u":0,"v":1}
// Node ids must be dense in [0, N). Duplicate edges are merged.

TextAttributedGraph read_dataset(std::istream& in);
TextAttributedGraph load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const TextAttributedGraph& g);
void save_dataset(const std::filesystem::path& path, const TextAttributedGraph& g);

}  // namespace ultratag
