#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_util.hpp"
#include "ultratag/core/dataset_io.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/core/graph.hpp"
#include "ultratag/core/hash.hpp"
#include "ultratag/core/rng.hpp"
#include "ultratag/core/sparsify.hpp"
#include "ultratag/core/text.hpp"

namespace ultratag {
namespace {

using testing::random_edges;
using testing::small_graph;

TEST(Edge, NormalizesOrder) {
  const auto e = Edge::make(5, 2);
  EXPECT_EQ(e.u, 2u);
  EXPECT_EQ(e.v, 5u);
}

TEST(Edge, SelfLoopRejected) {
  try {
    Edge::make(3, 3);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(EdgeSet, DeduplicatesUnorderedPairs) {
  EdgeSet s({Edge::make(0, 1), Edge::make(1, 0), Edge::make(2, 1)});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(1, 0));
  EXPECT_TRUE(s.contains(1, 2));
  EXPECT_FALSE(s.contains(0, 2));
  EXPECT_EQ(s.min_node_count(), 3u);
}

TEST(Neighbors, PathGraphMiddle) {
  auto g = small_graph(3, EdgeSet({Edge::make(0, 1), Edge::make(1, 2)}));
  EXPECT_EQ(neighbors(g, 1), (std::vector<NodeId>{0, 2}));
}

TEST(Neighbors, IsolatedNodeIsEmpty) {
  auto g = small_graph(3, EdgeSet({Edge::make(0, 1)}));
  EXPECT_TRUE(neighbors(g, 2).empty());
}

TEST(Neighbors, StarLeavesAscending) {
  auto g = small_graph(4, EdgeSet({Edge::make(0, 3), Edge::make(0, 1), Edge::make(0, 2)}));
  EXPECT_EQ(neighbors(g, 0), (std::vector<NodeId>{1, 2, 3}));
}

TEST(Neighbors, OutOfRangeThrows) {
  auto g = small_graph(2, EdgeSet{});
  EXPECT_THROW(neighbors(g, 2), std::out_of_range);
}

TEST(Accuracy, Examples) {
  auto g = small_graph(4, EdgeSet{});  // labels 0 1 0 1
  const std::vector<NodeId> mask{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(accuracy(std::vector<ClassId>{0, 1, 0, 1}, g, mask), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(std::vector<ClassId>{1, 0, 1, 0}, g, mask), 0.0);
  EXPECT_DOUBLE_EQ(accuracy(std::vector<ClassId>{0, 1, 0, 0}, g, mask), 0.75);
  EXPECT_THROW(accuracy(std::vector<ClassId>{0, 1, 0, 1}, g, std::vector<NodeId>{}), std::invalid_argument);
}

TEST(Validate, RejectsBrokenInvariants) {
  auto g = small_graph(3, EdgeSet({Edge::make(0, 1)}));
  EXPECT_NO_THROW(g.validate());

  auto dangling = g;
  dangling.edges = EdgeSet({Edge::make(0, 5)});
  EXPECT_THROW(dangling.validate(), ValidationError);

  auto bad_label = g;
  bad_label.labels[1] = 9;
  EXPECT_THROW(bad_label.validate(), ValidationError);

  auto overlap = g;
  overlap.splits.test = {0};
  EXPECT_THROW(overlap.validate(), ValidationError);

  auto unlabeled_train = g;
  unlabeled_train.labels[2] = std::nullopt;
  EXPECT_THROW(unlabeled_train.validate(), ValidationError);
}

TEST(DatasetIo, ThreeNodesTwoEdges) {
  std::istringstream in(
      R"({"type":"meta","classes":["a","b"]}
{"type":"node","id":0,"text":"x","label":0,"split":"train"}
{"type":"node","id":1,"text":null,"label":1,"split":"test"}
{"type":"node","id":2,"text":"","label":null,"split":null}
{"type":"edge","u":0,"v":1}
{"type":"edge","u":2,"v":1}
)");
  const auto g = read_dataset(in);
  EXPECT_EQ(g.num_nodes, 3u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.num_classes(), 2u);
  EXPECT_FALSE(g.texts[1].has_value());
  ASSERT_TRUE(g.texts[2].has_value());
  EXPECT_EQ(*g.texts[2], "");
  EXPECT_FALSE(g.labels[2].has_value());
}

TEST(DatasetIo, SelfLoopIsValidationError) {
  std::istringstream in(R"({"type":"meta","classes":["a"]}
{"type":"node","id":0,"text":"x","label":0,"split":"train"}
{"type":"edge","u":0,"v":0}
)");
  try {
    read_dataset(in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(DatasetIo, MalformedAndInvalidRecords) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_dataset(in);
  };
  EXPECT_THROW(parse("{not json\n"), ParseError);
  EXPECT_THROW(parse(R"({"type":"node","id":0,"text":"x","label":null,"split":null})" "\n"), ParseError);
  EXPECT_THROW(parse(R"({"type":"meta","classes":["a"]})" "\n" R"({"type":"node","id":0,"text":"x","label":3,"split":null})" "\n"),
               ValidationError);
  EXPECT_THROW(parse(R"({"type":"meta","classes":["a"]})" "\n" R"({"type":"node","id":0,"text":"x","label":0,"split":null})" "\n"
                     R"({"type":"edge","u":0,"v":4})" "\n"),
               ValidationError);
}

TEST(DatasetIo, CoraFixtureHasSevenClasses) {
  const auto g = load_dataset(std::string(ULTRATAG_TEST_DATA) + "/cora_tiny.jsonl");
  ASSERT_EQ(g.num_classes(), 7u);
  EXPECT_EQ(g.class_names[0], "Case-based");
  EXPECT_EQ(g.class_names[2], "Neural Networks");
  EXPECT_EQ(g.class_names[6], "Theory");
  EXPECT_EQ(g.num_nodes, 7u);
  EXPECT_EQ(g.edges.size(), 5u);  // (0,1) listed twice
  EXPECT_FALSE(g.texts[4].has_value());
  EXPECT_EQ(g.splits.out, std::vector<NodeId>{6});
}

TEST(DatasetIo, RoundTrip) {
  Rng rng(3);
  auto g = small_graph(20, random_edges(20, 0.2, rng), 3);
  g.texts[4] = std::nullopt;
  g.texts[5] = "";
  g.texts[6] = "quotes \" and\nnewlines and unicode é";
  g.splits.train = {0, 1, 2};
  g.splits.val = {3};
  g.splits.test = {4, 5};
  g.splits.out = {19};
  std::ostringstream out;
  write_dataset(out, g);
  std::istringstream in(out.str());
  EXPECT_EQ(read_dataset(in), g);
}

TEST(Sparsify, ZeroRatioIsIdentity) {
  Rng rng(1);
  const auto g = small_graph(30, random_edges(30, 0.2, rng));
  EXPECT_EQ(sparsify(g, {0.0, 42}), g);
}

TEST(Sparsify, FloorCountsOnTenNodes) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < 10; ++i) e.push_back(Edge::make(i, (i + 1) % 10));
  const auto g = small_graph(10, EdgeSet(e));
  ASSERT_EQ(g.edges.size(), 10u);
  const auto s = sparsify(g, {0.2, 7});
  std::size_t present = 0;
  for (const auto& t : s.texts) present += t.has_value() ? 1 : 0;
  EXPECT_EQ(present, 8u);
  EXPECT_EQ(s.edges.size(), 8u);
}

TEST(Sparsify, DeterministicAndSubset) {
  Rng rng(9);
  const auto g = small_graph(50, random_edges(50, 0.1, rng));
  for (double ratio : {0.2, 0.5, 0.8}) {
    const auto a = sparsify(g, {ratio, 42});
    EXPECT_EQ(a, sparsify(g, {ratio, 42}));
    EXPECT_TRUE(a.edges.is_subset_of(g.edges));
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      if (a.texts[i]) EXPECT_EQ(a.texts[i], g.texts[i]);
    }
    EXPECT_EQ(a.labels, g.labels);
    EXPECT_EQ(a.splits, g.splits);
  }
  EXPECT_NE(sparsify(g, {0.5, 42}).edges, sparsify(g, {0.5, 43}).edges);
}

TEST(Sparsify, FullRatioRemovesEverything) {
  Rng rng(2);
  const auto s = sparsify(small_graph(12, random_edges(12, 0.4, rng)), {1.0, 5});
  EXPECT_TRUE(s.edges.empty());
  for (const auto& t : s.texts) EXPECT_FALSE(t.has_value());
}

TEST(Sparsify, TextDrawsIgnoreEdgeSet) {
  Rng rng(4);
  const auto dense = small_graph(40, random_edges(40, 0.3, rng));
  const auto empty = small_graph(40, EdgeSet{});
  EXPECT_EQ(sparsify(dense, {0.5, 11}).texts, sparsify(empty, {0.5, 11}).texts);
}

TEST(Sparsify, RemovalCountIsRobustToDecimalRatios) {
  EXPECT_EQ(removal_count(0.29, 100), 29u);
  EXPECT_EQ(removal_count(0.2, 10), 2u);
  EXPECT_EQ(removal_count(0.8, 7), 5u);
  EXPECT_EQ(removal_count(1.0, 13), 13u);
  EXPECT_EQ(removal_count(0.0, 13), 0u);
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(123);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_index(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, SampleWithoutReplacementIsSortedAndDistinct) {
  Rng rng(5);
  const auto s = rng.sample_without_replacement(100, 40);
  ASSERT_EQ(s.size(), 40u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 40u);
  EXPECT_LT(s.back(), 100u);
}

TEST(Rng, NamedSubstreamsDiffer) {
  auto a = Rng::substream(42, "sparsify/texts");
  auto b = Rng::substream(42, "sparsify/edges");
  auto c = Rng::substream(42, "sparsify/texts");
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_EQ(x, c.next_u64());
}

TEST(Text, Tokenize) {
  EXPECT_EQ(tokenize("Hello, World-42!  x"), (std::vector<std::string>{"hello", "world", "42", "x"}));
  EXPECT_TRUE(tokenize(" ,.; ").empty());
}

TEST(Text, Formatting) {
  EXPECT_EQ(format_decimal(1.0), "1.0");
  EXPECT_EQ(format_decimal(0.25), "0.25");
  EXPECT_EQ(format_decimal(0.0), "0.0");
  EXPECT_EQ(format_percent(0.8), "80%");
  EXPECT_EQ(format_percent(0.2), "20%");
  EXPECT_EQ(format_percent(0.125), "12.5%");
}

TEST(Text, Utf8TruncateKeepsWholeSequences) {
  const std::string s = "abéc";  // 'é' is two bytes
  EXPECT_EQ(utf8_truncate(s, 3), "ab");
  EXPECT_EQ(utf8_truncate(s, 4), "abé");
  EXPECT_EQ(utf8_truncate(s, 100), s);
}

TEST(Hash, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, FieldsAreLengthPrefixed) {
  EXPECT_NE(FieldHasher().add("ab").add("c").hex(), FieldHasher().add("a").add("bc").hex());
  EXPECT_EQ(FieldHasher().add("ab").add(0.5).hex(), FieldHasher().add("ab").add(0.5).hex());
}

}  // namespace
}  // namespace ultratag
