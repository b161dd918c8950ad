#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "ultratag/core/errors.hpp"
#include "ultratag/llm/provider.hpp"

namespace ultratag::llm {

using nlohmann::json;

std::pair<std::string, std::string> split_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string_view::npos) return {std::string(url), std::string()};
  std::string prefix(url.substr(path_start));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {std::string(url.substr(0, path_start)), prefix};
}

RemoteProvider::RemoteProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.temperature = 0.0;
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string RemoteProvider::build_request_body(std::string_view model, std::string_view content) {
  json body{{"model", model},
            {"messages", json::array({json{{"role", "user"}, {"content", content}}})},
            {"temperature", 0}};
  return body.dump();
}

std::string RemoteProvider::extract_content(std::string_view response_body) {
  try {
    const auto doc = json::parse(response_body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("completion content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what());
  }
}

std::string RemoteProvider::complete(const RenderedPrompt& prompt) {
  const auto [base, prefix] = split_endpoint(cfg_.endpoint);
  const std::string path = prefix + "/v1/chat/completions";
  const std::string body = build_request_body(cfg_.model, prompt.full_text);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  const int attempts = 1 + std::max(0, cfg_.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * (1 << (attempt - 1)));

    httplib::Client client(base);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return extract_content(res->body);
    last_error = "HTTP " + std::to_string(res->status);
    const bool retryable = res->status == 429 || res->status >= 500;
    if (!retryable) break;
  }
  throw TransportError("chat completion failed after " + std::to_string(attempts) +
                       " attempt(s): " + last_error);
}

}  // namespace ultratag::llm
