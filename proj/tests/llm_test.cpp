#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "ultratag/core/errors.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/llm/gateway.hpp"
#include "ultratag/llm/prompt.hpp"
#include "ultratag/llm/provider.hpp"
#include "ultratag/llm/response_cache.hpp"

namespace ultratag::llm {
namespace {

using ultratag::testing::TempDir;

const std::vector<std::string> kCora{"Case-based",  "Genetic Algorithms", "Neural Networks", "Probabilistic Methods",
                                     "Reinforcement Learning", "Rule Learning", "Theory"};

bool contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

TEST(RenderPrompt, SoftLabelWording) {
  const auto desc = *builtin_dataset_description("cora");
  const auto p = render_prompt(PromptKind::SoftLabel, desc, {{"some paper"}, {}}, kCora);
  EXPECT_TRUE(contains(p.full_text, "provide only the label as your response"));
  EXPECT_EQ(p.full_text, p.dataset_description + p.question);
  EXPECT_EQ(p.full_text.rfind(desc, 0), 0u);
  EXPECT_TRUE(p.full_text.ends_with("as follows:some paper"));
}

TEST(RenderPrompt, EdgeJudgeCarriesBothNodes) {
  const auto p = render_prompt(PromptKind::EdgeJudge, "desc", {{"text one", "text two"}, {"Theory", "Rule Learning"}});
  EXPECT_TRUE(contains(p.full_text, "Only output the probability value"));
  EXPECT_TRUE(contains(p.full_text, "As for Node 1: text one. Your prediction label is Theory; "
                                    "As for Node 2: text two. Your prediction label is Rule Learning."));
  EXPECT_EQ(p.full_text, p.dataset_description + p.question);
}

TEST(RenderPrompt, EmptyDescriptionStartsWithQuestion) {
  const auto p = render_prompt(PromptKind::Summary, "", {{"x"}, {}});
  EXPECT_EQ(p.full_text, p.question);
  EXPECT_EQ(p.full_text.rfind("Please summarize the title and abstract", 0), 0u);
  EXPECT_TRUE(contains(render_prompt(PromptKind::Keywords, "", {{"x"}, {}}).full_text, "five keywords"));
}

TEST(RenderPrompt, ArityMismatchThrows) {
  EXPECT_THROW(render_prompt(PromptKind::Summary, "", {{"a", "b"}, {}}), std::invalid_argument);
  EXPECT_THROW(render_prompt(PromptKind::EdgeJudge, "", {{"a", "b"}, {"x"}}), std::invalid_argument);
  EXPECT_THROW(render_prompt(PromptKind::SoftLabel, "", {{}, {}}), std::invalid_argument);
}

TEST(RenderPrompt, GenericDescriptionListsClasses) {
  const auto d = generic_dataset_description({"alpha", "beta"});
  EXPECT_TRUE(contains(d, "alpha"));
  EXPECT_TRUE(contains(d, "beta"));
  EXPECT_FALSE(builtin_dataset_description("no-such-dataset").has_value());
  EXPECT_TRUE(builtin_dataset_description("PubMed").has_value());
}

TEST(Offline, EdgeScoreExamples) {
  EXPECT_EQ(offline_edge_score("a b", "a b"), "1.0");
  EXPECT_EQ(offline_edge_score("a", "b"), "0.0");
  EXPECT_EQ(offline_edge_score("a b", "b c"), ultratag::format_decimal(1.0 / 3.0));
  EXPECT_EQ(offline_edge_score("", ""), "0.0");
}

TEST(Offline, KeywordsByFrequencyThenLexicographic) {
  const auto kw = offline_keywords("x x y");
  EXPECT_EQ(kw.rfind("x", 0), 0u);
  EXPECT_EQ(kw, "x, y");
  EXPECT_EQ(offline_keywords("b a c b a d e f"), "a, b, c, d, e");
  EXPECT_EQ(offline_keywords(""), "");
}

TEST(Offline, SummaryKeepsFirstThreeSentences) {
  EXPECT_EQ(offline_summarize("One. Two!  Three? Four."), "One. Two! Three?");
  EXPECT_EQ(offline_summarize("no terminator"), "no terminator");
  EXPECT_EQ(offline_summarize(""), "");
}

TEST(Offline, SoftLabelOverlapWithTies) {
  EXPECT_EQ(offline_soft_label("neural networks training", kCora), "Neural Networks");
  // "learning" overlaps Reinforcement Learning and Rule Learning equally: class order wins.
  EXPECT_EQ(offline_soft_label("learning", kCora), "Reinforcement Learning");
  EXPECT_EQ(offline_soft_label("", kCora), "Case-based");
}

TEST(Offline, ProviderIsPure) {
  OfflineProvider p;
  const auto prompt = render_prompt(PromptKind::Keywords, "d", {{"alpha beta beta"}, {}});
  EXPECT_EQ(p.complete(prompt), p.complete(prompt));
  EXPECT_EQ(p.complete(prompt), "beta, alpha");
}

TEST(CacheKey, NoCollisionsOverGeneratedCorpus) {
  std::set<std::string> keys;
  for (int i = 0; i < 2000; ++i) keys.insert(cache_key(ProviderKind::Offline, "m", "prompt " + std::to_string(i)));
  EXPECT_EQ(keys.size(), 2000u);
  EXPECT_NE(cache_key(ProviderKind::Offline, "m", "p"), cache_key(ProviderKind::Remote, "m", "p"));
  EXPECT_NE(cache_key(ProviderKind::Offline, "m", "p"), cache_key(ProviderKind::Offline, "n", "p"));
  EXPECT_EQ(cache_key(ProviderKind::Offline, "m", "p").size(), 64u);
}

TEST(ResponseCache, StoresRawBytes) {
  TempDir dir;
  ResponseCache cache(dir.path());
  EXPECT_FALSE(cache.get("abc").has_value());
  cache.put("abc", std::string("x\0y\n", 4));
  EXPECT_EQ(*cache.get("abc"), std::string("x\0y\n", 4));
  EXPECT_TRUE(std::filesystem::exists(dir / "abc"));
}

class CountingProvider final : public CompletionProvider {
 public:
  std::string complete(const RenderedPrompt& prompt) override {
    ++calls;
    std::this_thread::sleep_for(std::chrono::microseconds((prompt.full_text.size() * 37) % 500));
    return "echo:" + prompt.payload.texts.front();
  }
  ProviderKind kind() const noexcept override { return ProviderKind::Offline; }
  std::string model() const override { return "counting"; }
  std::atomic<int> calls{0};
};

TEST(Gateway, SecondCallServedFromCache) {
  TempDir dir;
  auto owned = std::make_unique<CountingProvider>();
  auto* provider = owned.get();
  LlmGateway gw(std::move(owned), dir.path(), 2);
  const auto p = render_prompt(PromptKind::Summary, "d", {{"hello"}, {}});
  const auto first = gw.complete(p);
  const auto second = gw.complete(p);
  EXPECT_EQ(first, second);
  EXPECT_EQ(provider->calls.load(), 1);
  EXPECT_EQ(gw.stats().fresh, 1u);
  EXPECT_EQ(gw.stats().cached, 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / gw.key_for(p)));

  gw.complete(p, {.bypass_cache = true});
  EXPECT_EQ(provider->calls.load(), 2);
  EXPECT_FALSE(gw.audit_log_path().has_value());
}

TEST(Gateway, BatchOrderMatchesInput) {
  auto owned = std::make_unique<CountingProvider>();
  LlmGateway gw(std::move(owned), {}, 4);
  std::vector<RenderedPrompt> prompts;
  for (int i = 0; i < 50; ++i) prompts.push_back(render_prompt(PromptKind::Summary, "", {{std::to_string(i)}, {}}));
  const auto out = gw.complete_batch(prompts);
  ASSERT_EQ(out.size(), 50u);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(out[i], "echo:" + std::to_string(i));
}

class FakeChatServer {
 public:
  FakeChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++hits;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      if (n <= failures) {
        res.status = failure_status;
        res.set_content("boom", "text/plain");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json reply = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", "reply to " + body["model"].get<std::string>()}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> hits{0};
  int failures = 0;
  int failure_status = 500;
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ProviderConfig remote_config(const std::string& url, const std::filesystem::path& cache) {
  ProviderConfig cfg;
  cfg.kind = ProviderKind::Remote;
  cfg.endpoint = url;
  cfg.model = "test-model";
  cfg.max_retries = 2;
  cfg.backoff = std::chrono::milliseconds(1);
  cfg.timeout = std::chrono::milliseconds(5000);
  cfg.cache_dir = cache;
  cfg.api_key_env = "ULTRATAG_TEST_KEY_UNSET";
  return cfg;
}

TEST(Remote, ServerErrorThriceIsTransportError) {
  FakeChatServer server;
  server.failures = 3;
  TempDir dir;
  LlmGateway gw(remote_config(server.url(), dir.path()));
  const auto p = render_prompt(PromptKind::Summary, "", {{"t"}, {}});
  try {
    gw.complete(p);
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.prompt_hash(), gw.key_for(p));
  }
  EXPECT_EQ(server.hits.load(), 3);
}

TEST(Remote, RetriesThenSucceeds) {
  FakeChatServer server;
  server.failures = 2;
  server.failure_status = 429;
  TempDir dir;
  LlmGateway gw(remote_config(server.url(), dir.path()));
  EXPECT_EQ(gw.complete(render_prompt(PromptKind::Summary, "", {{"t"}, {}})), "reply to test-model");
  EXPECT_EQ(server.hits.load(), 3);
}

TEST(Remote, ClientErrorIsNotRetried) {
  FakeChatServer server;
  server.failures = 5;
  server.failure_status = 400;
  TempDir dir;
  LlmGateway gw(remote_config(server.url(), dir.path()));
  EXPECT_THROW(gw.complete(render_prompt(PromptKind::Summary, "", {{"t"}, {}})), TransportError);
  EXPECT_EQ(server.hits.load(), 1);
}

TEST(Remote, WireFormatCacheAndAudit) {
  FakeChatServer server;
  TempDir dir;
  LlmGateway gw(remote_config(server.url(), dir.path()));
  const auto p = render_prompt(PromptKind::SoftLabel, "desc", {{"body"}, {}});
  EXPECT_EQ(gw.complete(p), "reply to test-model");

  const auto sent = nlohmann::json::parse(server.last_body);
  EXPECT_EQ(sent["model"], "test-model");
  EXPECT_EQ(sent["temperature"].get<double>(), 0.0);
  ASSERT_EQ(sent["messages"].size(), 1u);
  EXPECT_EQ(sent["messages"][0]["role"], "user");
  EXPECT_EQ(sent["messages"][0]["content"], p.full_text);
  EXPECT_TRUE(server.last_auth.empty());

  EXPECT_EQ(gw.complete(p), "reply to test-model");
  EXPECT_EQ(server.hits.load(), 1);

  ASSERT_TRUE(gw.audit_log_path().has_value());
  const auto log = ultratag::testing::read_file(*gw.audit_log_path());
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1);
  EXPECT_EQ(log.rfind(gw.key_for(p) + "\t", 0), 0u);
}

TEST(Remote, UnreachableEndpointFails) {
  TempDir dir;
  auto cfg = remote_config("http://127.0.0.1:1", dir.path());
  cfg.max_retries = 0;
  LlmGateway gw(cfg);
  EXPECT_THROW(gw.complete(render_prompt(PromptKind::Summary, "", {{"t"}, {}})), TransportError);
}

TEST(Remote, RequestAndResponseHelpers) {
  const auto body = nlohmann::json::parse(RemoteProvider::build_request_body("m", "hi \"there\""));
  EXPECT_EQ(body["messages"][0]["content"], "hi \"there\"");
  EXPECT_EQ(RemoteProvider::extract_content(R"({"choices":[{"message":{"content":"ok"}}]})"), "ok");
  EXPECT_THROW(RemoteProvider::extract_content("{}"), TransportError);
  EXPECT_THROW(RemoteProvider::extract_content("not json"), TransportError);

  EXPECT_EQ(split_endpoint("http://host:8000"), (std::pair<std::string, std::string>{"http://host:8000", ""}));
  EXPECT_EQ(split_endpoint("https://api.example.com/proxy/"),
            (std::pair<std::string, std::string>{"https://api.example.com", "/proxy"}));
}

TEST(ProviderKind, Parse) {
  EXPECT_EQ(parse_provider_kind("offline"), ProviderKind::Offline);
  EXPECT_EQ(parse_provider_kind("remote"), ProviderKind::Remote);
  EXPECT_THROW(parse_provider_kind("local"), std::invalid_argument);
}

}  // namespace
}  // namespace ultratag::llm
