#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "test_util.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/embed/embedder.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ultratag::embed {
namespace {

using ultratag::testing::TempDir;

std::size_t nonzeros(const ColVector& v) { return static_cast<std::size_t>((v.array() != 0.0).count()); }

TEST(HashEmbed, IdenticalTextsIdenticalRows) {
  const auto m = embed({"graph neural nets", "graph neural nets", ""}, {});
  EXPECT_EQ(m.values.row(0), m.values.row(1));
  EXPECT_TRUE(m.values.row(2).isZero(0.0));
  EXPECT_NEAR(m.values.row(0).norm(), 1.0, 1e-12);
  EXPECT_NO_THROW(m.check_row_norms());
  EXPECT_EQ(m.dim(), 256u);
}

TEST(HashEmbed, DistinctSingleTokens) {
  const auto a = offline_hash_embed("a", 64);
  const auto b = offline_hash_embed("b", 64);
  const double cos = a.dot(b);
  if (hash_bucket("a", 64) != hash_bucket("b", 64)) {
    EXPECT_EQ(cos, 0.0);
  } else {
    EXPECT_EQ(std::abs(cos), 1.0);
  }
  EXPECT_EQ(a(static_cast<Eigen::Index>(hash_bucket("a", 64))), hash_sign("a"));
}

TEST(HashEmbed, RepetitionAndOrder) {
  EXPECT_TRUE(offline_hash_embed("x x x", 32).isApprox(offline_hash_embed("x", 32), 1e-12));
  EXPECT_LE(nonzeros(offline_hash_embed("x y", 32)), 2u);
  EXPECT_EQ(offline_hash_embed("alpha beta gamma", 128), offline_hash_embed("gamma, Alpha beta", 128));
  EXPECT_EQ(nonzeros(offline_hash_embed("...", 16)), 0u);
  EXPECT_THROW(offline_hash_embed("x", 1), std::invalid_argument);
}

TEST(HashEmbed, TermFrequencyWeighting) {
  const std::size_t dim = 4096;
  ASSERT_NE(hash_bucket("p", dim), hash_bucket("q", dim));
  const auto v = offline_hash_embed("p p q", dim);
  const double wp = 1.0 + std::log(2.0);
  const double norm = std::sqrt(wp * wp + 1.0);
  EXPECT_NEAR(std::abs(v(static_cast<Eigen::Index>(hash_bucket("p", dim)))), wp / norm, 1e-12);
  EXPECT_NEAR(std::abs(v(static_cast<Eigen::Index>(hash_bucket("q", dim)))), 1.0 / norm, 1e-12);
}

TEST(EmbeddingMatrix, RowNormCheck) {
  EmbeddingMatrix m{DenseMatrix::Zero(2, 3)};
  m.values(0, 0) = 1.0;
  EXPECT_NO_THROW(m.check_row_norms());
  m.values(1, 1) = 0.5;
  EXPECT_THROW(m.check_row_norms(), NumericError);
}

TEST(EmbeddingIo, RoundtripAndCorruption) {
  TempDir dir;
  const auto m = embed({"one", "", "two three"}, {.dim = 16});
  const auto path = dir / "emb.bin";
  save_embeddings(path, m);
  EXPECT_EQ(load_embeddings(path).values, m.values);

  const auto raw = ultratag::testing::read_file(path);
  EXPECT_EQ(raw.substr(0, 8), "UTGEMB01");
  EXPECT_EQ(raw.size(), 8u + 8 + 8 + 4 + 3 * 16 * 8);

  auto tampered = raw;
  tampered.back() ^= 0x01;
  ultratag::testing::write_file(path, tampered);
  EXPECT_THROW(load_embeddings(path), ParseError);

  ultratag::testing::write_file(path, raw);
  ultratag::testing::write_file(dir / "emb.bin.sha256", std::string(64, '0'));
  EXPECT_THROW(load_embeddings(path), ParseError);
}

TEST(RemoteEmbed, ProtocolHelpers) {
  const auto req = nlohmann::json::parse(build_embedding_request("m", {"a", "b"}));
  EXPECT_EQ(req["model"], "m");
  EXPECT_EQ(req["input"].size(), 2u);
  const auto v = parse_embedding_response(
      R"({"data":[{"index":1,"embedding":[0,1]},{"index":0,"embedding":[1,0]}]})", 2);
  EXPECT_EQ(v[0], (std::vector<double>{1, 0}));
  EXPECT_EQ(v[1], (std::vector<double>{0, 1}));
  EXPECT_THROW(parse_embedding_response(R"({"data":[]})", 1), TransportError);
  EXPECT_THROW(parse_embedding_response("nope", 1), TransportError);
}

TEST(RemoteEmbed, LocalServerBatchesAndNormalizes) {
  httplib::Server server;
  std::atomic<int> requests{0};
  server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++requests;
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t k = 0; k < body["input"].size(); ++k) {
      const double len = static_cast<double>(body["input"][k].get<std::string>().size());
      data.push_back({{"index", k}, {"embedding", {len, 2.0 * len, 0.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  EmbeddingProviderConfig cfg;
  cfg.kind = EmbeddingProviderKind::Remote;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
  cfg.batch_size = 2;
  cfg.workers = 2;
  cfg.api_key_env = "ULTRATAG_TEST_KEY_UNSET";
  const auto m = embed({"aa", "", "bbb", "c", "dddd"}, cfg);
  server.stop();
  t.join();

  EXPECT_EQ(requests.load(), 2);
  ASSERT_EQ(m.rows(), 5u);
  ASSERT_EQ(m.dim(), 3u);
  EXPECT_TRUE(m.values.row(1).isZero(0.0));
  const double inv = 1.0 / std::sqrt(5.0);
  for (int r : {0, 2, 3, 4}) {
    EXPECT_NEAR(m.values(r, 0), inv, 1e-12);
    EXPECT_NEAR(m.values(r, 1), 2 * inv, 1e-12);
  }
  EXPECT_NO_THROW(m.check_row_norms());
}

TEST(RemoteEmbed, UnreachableIsTransportError) {
  EmbeddingProviderConfig cfg;
  cfg.kind = EmbeddingProviderKind::Remote;
  cfg.endpoint = "http://127.0.0.1:1";
  cfg.max_retries = 0;
  EXPECT_THROW(embed({"x"}, cfg), TransportError);
  EXPECT_EQ(parse_embedding_provider_kind("remote"), EmbeddingProviderKind::Remote);
  EXPECT_THROW(parse_embedding_provider_kind("bert"), std::invalid_argument);
}

}  // namespace
}  // namespace ultratag::embed
