#include "ultratag/embed/embedder.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "ultratag/core/errors.hpp"
#include "ultratag/core/hash.hpp"
#include "ultratag/core/parallel.hpp"
#include "ultratag/core/rng.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/llm/provider.hpp"

namespace ultratag::embed {

using nlohmann::json;

void EmbeddingMatrix::check_row_norms(double tol) const {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const double n = values.row(i).norm();
    if (n != 0.0 && std::abs(n - 1.0) > tol) {
      throw NumericError("embedding row " + std::to_string(i) + " has norm " + format_decimal(n));
    }
  }
}

std::string_view to_string(EmbeddingProviderKind kind) {
  return kind == EmbeddingProviderKind::Remote ? "remote" : "offline";
}

EmbeddingProviderKind parse_embedding_provider_kind(std::string_view name) {
  if (name == "remote") return EmbeddingProviderKind::Remote;
  if (name == "offline") return EmbeddingProviderKind::Offline;
  throw std::invalid_argument("unknown embedding provider '" + std::string(name) + "'");
}

std::size_t hash_bucket(std::string_view token, std::size_t dim) {
  return static_cast<std::size_t>(fnv1a64(token) % dim);
}

int hash_sign(std::string_view token) {
  return (splitmix64(fnv1a64(token, 0x84222325cbf29ce4ULL)) >> 63) ? -1 : 1;
}

ColVector offline_hash_embed(std::string_view text, std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("offline_hash_embed: dim must be >= 2");
  std::map<std::string, std::size_t> tf;
  for (auto& tok : tokenize(text)) ++tf[tok];
  ColVector v = ColVector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& [tok, count] : tf) {
    v(static_cast<Eigen::Index>(hash_bucket(tok, dim))) +=
        hash_sign(tok) * (1.0 + std::log(static_cast<double>(count)));
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

std::string build_embedding_request(std::string_view model, const std::vector<std::string>& inputs) {
  return json{{"model", model}, {"input", inputs}}.dump();
}

std::vector<std::vector<double>> parse_embedding_response(std::string_view body, std::size_t expected) {
  try {
    const auto doc = json::parse(body);
    const auto& data = doc.at("data");
    if (!data.is_array() || data.size() != expected) {
      throw TransportError("embedding response has " + std::to_string(data.size()) + " vectors, expected " +
                           std::to_string(expected));
    }
    std::vector<std::vector<double>> out(expected);
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::size_t idx = data[k].contains("index") ? data[k]["index"].get<std::size_t>() : k;
      if (idx >= expected) throw TransportError("embedding index out of range");
      out[idx] = data[k].at("embedding").get<std::vector<double>>();
    }
    return out;
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed embeddings response: ") + e.what());
  }
}

namespace {

std::vector<std::vector<double>> remote_batch(const EmbeddingProviderConfig& cfg, const std::vector<std::string>& inputs) {
  const auto [base, prefix] = llm::split_endpoint(cfg.endpoint);
  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str())) headers.emplace("Authorization", std::string("Bearer ") + key);
  const auto body = build_embedding_request(cfg.model, inputs);
  std::string last_error;
  const int attempts = 1 + std::max(0, cfg.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg.backoff * (1 << (attempt - 1)));
    httplib::Client client(base);
    client.set_connection_timeout(cfg.timeout);
    client.set_read_timeout(cfg.timeout);
    auto res = client.Post(prefix + "/v1/embeddings", headers, body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return parse_embedding_response(res->body, inputs.size());
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500) break;
  }
  throw TransportError("embedding request failed: " + last_error);
}

EmbeddingMatrix embed_remote(const std::vector<std::string>& texts, const EmbeddingProviderConfig& cfg) {
  std::vector<std::size_t> nonempty;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!texts[i].empty()) nonempty.push_back(i);
  }
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);
  const std::size_t batches = (nonempty.size() + batch - 1) / batch;
  std::vector<std::vector<std::vector<double>>> results(batches);
  parallel_for_indexed(batches, cfg.workers, [&](std::size_t b) {
    std::vector<std::string> inputs;
    for (std::size_t k = b * batch; k < std::min(nonempty.size(), (b + 1) * batch); ++k) inputs.push_back(texts[nonempty[k]]);
    results[b] = remote_batch(cfg, inputs);
  });

  std::size_t dim = 0;
  for (const auto& r : results) {
    for (const auto& v : r) {
      if (dim == 0) dim = v.size();
      if (v.size() != dim || dim == 0) throw TransportError("embedding dimension mismatch across batches");
    }
  }
  EmbeddingMatrix m{DenseMatrix::Zero(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim))};
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < results[b].size(); ++k) {
      const auto row = static_cast<Eigen::Index>(nonempty[b * batch + k]);
      const auto& v = results[b][k];
      for (std::size_t j = 0; j < dim; ++j) m.values(row, static_cast<Eigen::Index>(j)) = v[j];
      const double n = m.values.row(row).norm();
      if (n > 0.0) m.values.row(row) /= n;
    }
  }
  require_finite(m.values, "remote embeddings");
  return m;
}

}  // namespace

EmbeddingMatrix embed(const std::vector<std::string>& texts, const EmbeddingProviderConfig& cfg) {
  if (cfg.kind == EmbeddingProviderKind::Remote) return embed_remote(texts, cfg);
  EmbeddingMatrix m{DenseMatrix::Zero(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(cfg.dim))};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!texts[i].empty()) m.values.row(static_cast<Eigen::Index>(i)) = offline_hash_embed(texts[i], cfg.dim).transpose();
  }
  return m;
}

}  // namespace ultratag::embed
