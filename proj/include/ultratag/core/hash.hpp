#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ultratag {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Incremental SHA-256 over a sequence of length-prefixed fields, so that
/// ("ab","c") and ("a","bc") never hash equal.
class FieldHasher {
 public:
  FieldHasher& add(std::string_view field);
  FieldHasher& add(double value);
  FieldHasher& add(std::uint64_t value);
  std::string hex() const { return sha256_hex(buffer_); }

 private:
  std::string buffer_;
};

}  // namespace ultratag
