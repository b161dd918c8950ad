#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ultratag {

/// Lowercase, split on non-alphanumeric ASCII, drop empty tokens.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Shortest round-trip decimal, always with a fractional part ("1.0", "0.25").
std::string format_decimal(double value);

/// Value as a percentage label, e.g. 0.8 -> "80%".
std::string format_percent(double ratio);

/// Truncate to at most `max_bytes` without splitting a UTF-8 sequence.
std::string_view utf8_truncate(std::string_view s, std::size_t max_bytes);

}  // namespace ultratag
