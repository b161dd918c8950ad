#pragma once

#include <stdexcept>
#include <string>

namespace ultratag {

/// Malformed input record (dataset line, config line, artifact file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Completion or embedding provider failure after retries; exit code 3.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, std::string prompt_hash = {})
      : std::runtime_error(prompt_hash.empty() ? what : what + " [prompt " + prompt_hash + "]"),
        prompt_hash_(std::move(prompt_hash)) {}

  const std::string& prompt_hash() const noexcept { return prompt_hash_; }

 private:
  std::string prompt_hash_;
};

/// NaN/Inf or shape failure inside the numerical core; exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ultratag
