#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ultratag/gnn/dense.hpp"

namespace ultratag::embed {

/// N x d node representations; each row has unit L2 norm or is exactly zero.
struct EmbeddingMatrix {
  DenseMatrix values;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.cols()); }
  /// Throws NumericError if a row is neither unit-norm (within tol) nor zero.
  void check_row_norms(double tol = 1e-9) const;
};

enum class EmbeddingProviderKind { Offline, Remote };

struct EmbeddingProviderConfig {
  EmbeddingProviderKind kind = EmbeddingProviderKind::Offline;
  std::size_t dim = 256;  ///< offline only; remote width comes from the service
  std::string endpoint = "http://localhost:8001";
  std::string model = "bert-base-uncased-finetuned";
  std::size_t batch_size = 64;
  std::size_t workers = 4;
  int max_retries = 2;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff{500};
  std::string api_key_env = "OPENAI_API_KEY";
};

std::string_view to_string(EmbeddingProviderKind kind);
EmbeddingProviderKind parse_embedding_provider_kind(std::string_view name);

/// Signed feature hashing: token -> bucket fnv1a(token) mod dim, sign from a
/// second independent hash, weight 1 + ln(tf), then L2 normalization.
/// Throws std::invalid_argument when dim < 2.
ColVector offline_hash_embed(std::string_view text, std::size_t dim);

/// Bucket and sign used for a token; exposed for collision checks.
std::size_t hash_bucket(std::string_view token, std::size_t dim);
int hash_sign(std::string_view token);

/// Row i embeds texts[i]; empty texts give zero rows.
EmbeddingMatrix embed(const std::vector<std::string>& texts, const EmbeddingProviderConfig& cfg);

/// Remote protocol pieces, exposed for tests.
std::string build_embedding_request(std::string_view model, const std::vector<std::string>& inputs);
std::vector<std::vector<double>> parse_embedding_response(std::string_view body, std::size_t expected);

// Binary layout: "UTGEMB01", N u64, d u64, float width u32 (8), then N*d
// little-endian f64 row-major. A sidecar "<file>.sha256" holds the hex
// SHA-256 of the main file and is verified on load.
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace ultratag::embed
