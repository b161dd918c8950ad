#include <gtest/gtest.h>

#include <atomic>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

#include "test_util.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/structure/struct_augment.hpp"

namespace ultratag::structure {
namespace {

using ultratag::testing::random_edges;
using ultratag::testing::TempDir;

std::vector<double> dense_pagerank(const EdgeSet& edges, std::size_t n, double d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto adj = edges.adjacency_lists(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (adj[j].empty()) m(i, j) = 1.0 / static_cast<double>(n);
    }
    for (NodeId i : adj[j]) m(i, j) = 1.0 / static_cast<double>(adj[j].size());
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m.rows(), m.cols()) - d * m;
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(m.rows(), (1.0 - d) / static_cast<double>(n));
  const Eigen::VectorXd r = lhs.partialPivLu().solve(rhs);
  return {r.data(), r.data() + r.size()};
}

TEST(VirtualEdges, Examples) {
  DenseMatrix emb(4, 2);
  emb << 1, 0, 1, 0, 0.6, 0.8, 0, 1;
  std::vector<std::optional<ClassId>> labels{ClassId{0}, ClassId{0}, ClassId{0}, std::nullopt};
  const EdgeSet base({Edge::make(2, 3)});
  const auto v = virtual_edges(emb, labels, base, 0.5);
  EXPECT_EQ(v, EdgeSet({Edge::make(0, 1), Edge::make(0, 2), Edge::make(1, 2), Edge::make(2, 3)}));
  EXPECT_EQ(virtual_edges(emb, labels, base, 0.7), EdgeSet({Edge::make(0, 1), Edge::make(2, 3)}));
  EXPECT_EQ(virtual_edges(emb, labels, base, 1.0), base);
  labels[1] = ClassId{1};
  EXPECT_EQ(virtual_edges(emb, labels, base, 0.5), EdgeSet({Edge::make(0, 2), Edge::make(2, 3)}));
}

TEST(VirtualEdges, BruteForceOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(20);
    DenseMatrix emb(static_cast<Eigen::Index>(n), 3);
    std::vector<std::optional<ClassId>> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) emb(static_cast<Eigen::Index>(i), c) = rng.uniform01() - 0.3;
      emb.row(static_cast<Eigen::Index>(i)).normalize();
      if (!rng.bernoulli(0.2)) labels[i] = static_cast<ClassId>(rng.uniform_index(2));
    }
    const auto base = random_edges(n, 0.1, rng);
    const double tau = rng.uniform01();
    std::vector<Edge> expected(base.begin(), base.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (labels[i] && labels[j] && *labels[i] == *labels[j] &&
            emb.row(static_cast<Eigen::Index>(i)).dot(emb.row(static_cast<Eigen::Index>(j))) > tau) {
          expected.push_back(Edge::make(static_cast<NodeId>(i), static_cast<NodeId>(j)));
        }
      }
    }
    EXPECT_EQ(virtual_edges(emb, labels, base, tau), EdgeSet(expected));
  }
}

TEST(PageRank, ThreeCycleUniform) {
  const EdgeSet tri({Edge::make(0, 1), Edge::make(1, 2), Edge::make(0, 2)});
  const auto r = pagerank(tri, 3);
  EXPECT_TRUE(r.converged);
  for (double s : r.scores) EXPECT_DOUBLE_EQ(s, 1.0 / 3.0);
}

TEST(PageRank, SingleNodeAndIsolated) {
  EXPECT_EQ(pagerank({}, 1).scores, std::vector<double>{1.0});
  const auto r = pagerank({}, 4);
  for (double s : r.scores) EXPECT_NEAR(s, 0.25, 1e-15);
}

TEST(PageRank, MatchesDenseOracle) {
  std::vector<Edge> star;
  for (NodeId i = 1; i < 8; ++i) star.push_back(Edge::make(0, i));
  const EdgeSet s(star);
  auto r = pagerank(s, 10, 0.85, 1e-13, 1000);
  auto oracle = dense_pagerank(s, 10, 0.85);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(r.scores[i], oracle[i], 1e-10);
  EXPECT_GT(r.scores[0], r.scores[1]);

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(40);
    const auto e = random_edges(n, 0.08, rng);
    r = pagerank(e, n, 0.85, 1e-13, 1000);
    oracle = dense_pagerank(e, n, 0.85);
    EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.scores[i], oracle[i], 1e-10);
  }
}

TEST(SelectTopK, Examples) {
  const std::vector<double> s{0.1, 0.4, 0.4, 0.05, 0.3};
  EXPECT_EQ(select_top_k(s, 1), std::vector<NodeId>{1});
  EXPECT_EQ(select_top_k(s, 2), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(select_top_k(s, 3), (std::vector<NodeId>{1, 2, 4}));
  EXPECT_EQ(select_top_k(s, 5), (std::vector<NodeId>{0, 1, 2, 3, 4}));
  EXPECT_THROW(select_top_k(s, 0), std::invalid_argument);
  EXPECT_THROW(select_top_k(s, 6), std::invalid_argument);
}

TEST(SelectionSize, Examples) {
  EXPECT_EQ(selection_size(360, 600), 36u);
  EXPECT_EQ(selection_size(5, 600), 1u);
  EXPECT_EQ(selection_size(0, 600), 1u);
  EXPECT_EQ(selection_size(100, 3, 0.5), 3u);
  EXPECT_EQ(selection_size(19, 100, 0.1), 1u);
}

TEST(ParseConfidence, Examples) {
  EXPECT_EQ(parse_confidence("0.73"), 0.73);
  EXPECT_EQ(parse_confidence("Probability: 1.2 then 0.4"), 0.4);
  EXPECT_EQ(parse_confidence("1"), 1.0);
  EXPECT_EQ(parse_confidence(" .5\n"), 0.5);
  EXPECT_EQ(parse_confidence("-0.2 or 7"), std::nullopt);
  EXPECT_EQ(parse_confidence("likely"), std::nullopt);
}

class JudgeProvider final : public llm::CompletionProvider {
 public:
  std::string complete(const llm::RenderedPrompt& p) override {
    ++calls;
    const auto& a = p.payload.texts.at(0);
    const auto& b = p.payload.texts.at(1);
    if (a.find("garbage") != std::string::npos || b.find("garbage") != std::string::npos) return "not sure";
    return a.front() == b.front() ? "0.9" : "0.2";
  }
  llm::ProviderKind kind() const noexcept override { return llm::ProviderKind::Offline; }
  std::string model() const override { return "judge"; }
  std::atomic<int> calls{0};
};

TEST(Reconfigure, JudgesEveryPairOfSelection) {
  const std::vector<std::string> texts{"apple", "avocado", "banana", "blueberry", "cherry", "apricot"};
  const std::vector<std::string> names(texts.size(), "Unknown");
  const EdgeSet base({Edge::make(0, 2), Edge::make(2, 4), Edge::make(1, 5), Edge::make(3, 4)});
  auto owned = std::make_unique<JudgeProvider>();
  auto* judge = owned.get();
  llm::LlmGateway gw(std::move(owned), {}, 3);
  const std::vector<NodeId> vc{4, 0, 1, 2};
  const auto r = reconfigure_edges(vc, texts, names, base, 0.5, gw, "");

  EXPECT_EQ(r.calls, 6u);
  EXPECT_EQ(judge->calls.load(), 6);
  EXPECT_EQ(r.fallbacks, 0u);
  EXPECT_EQ(r.confidences.size(), 6u);
  EXPECT_EQ(r.edges, EdgeSet({Edge::make(0, 1), Edge::make(1, 5), Edge::make(3, 4)}));
  EXPECT_EQ(r.confidences.at(Edge::make(0, 1)), (EdgeConfidence{0.9, ConfidenceSource::Llm}));
}

TEST(Reconfigure, UnparsableRetriesOnceThenFallsBack) {
  const std::vector<std::string> texts{"garbage a", "x", "y"};
  const std::vector<std::string> names(3, "Unknown");
  const EdgeSet base({Edge::make(0, 1)});
  auto owned = std::make_unique<JudgeProvider>();
  auto* judge = owned.get();
  llm::LlmGateway gw(std::move(owned), {}, 1);
  const std::vector<NodeId> vc{0, 1, 2};
  const auto r = reconfigure_edges(vc, texts, names, base, 0.5, gw, "");
  EXPECT_EQ(r.fallbacks, 2u);
  EXPECT_EQ(r.calls, 2u * 2 + 1);
  EXPECT_EQ(judge->calls.load(), 5);
  EXPECT_EQ(r.confidences.at(Edge::make(0, 1)), (EdgeConfidence{1.0, ConfidenceSource::Fallback}));
  EXPECT_EQ(r.confidences.at(Edge::make(0, 2)), (EdgeConfidence{0.0, ConfidenceSource::Fallback}));
  EXPECT_EQ(r.edges, EdgeSet({Edge::make(0, 1)}));
}

TEST(Reconfigure, EmptySelectionKeepsBase) {
  const EdgeSet base({Edge::make(0, 1)});
  llm::LlmGateway gw(std::make_unique<JudgeProvider>(), {}, 1);
  const auto r = reconfigure_edges({}, {"a", "b"}, {"U", "U"}, base, 0.5, gw, "");
  EXPECT_EQ(r.edges, base);
  EXPECT_EQ(r.calls, 0u);
  EXPECT_THROW(reconfigure_edges({}, {}, {}, base, 1.5, gw, ""), std::invalid_argument);
}

TEST(StageIo, Roundtrip) {
  TempDir dir;
  AdjacencyStage s;
  s.base = EdgeSet({Edge::make(0, 1), Edge::make(2, 3)});
  s.virtual_edges = EdgeSet({Edge::make(0, 1), Edge::make(2, 3), Edge::make(1, 3)});
  s.reconfigured = EdgeSet({Edge::make(0, 1), Edge::make(1, 2)});
  s.selected = {1, 2};
  s.confidences[Edge::make(1, 2)] = {0.123456789012345, ConfidenceSource::Llm};
  s.confidences[Edge::make(0, 3)] = {1.0, ConfidenceSource::Fallback};
  EXPECT_FALSE(stage_exists(dir.path(), "p"));
  save_stage(dir.path(), "p", s);
  EXPECT_TRUE(stage_exists(dir.path(), "p"));
  EXPECT_EQ(load_stage(dir.path(), "p"), s);

  std::stringstream edges;
  write_edge_list(edges, s.base);
  EXPECT_EQ(edges.str(), "0 1\n2 3\n");
  std::stringstream bad("0 x\n");
  EXPECT_THROW(read_edge_list(bad), ParseError);
}

}  // namespace
}  // namespace ultratag::structure
