#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ultratag/core/errors.hpp"

namespace ultratag::binary {

static_assert(std::endian::native == std::endian::little, "binary artifacts assume a little-endian host");

template <typename T>
void write(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw ParseError("unexpected end of binary file");
  return value;
}

inline void write_doubles(std::ostream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

inline void read_doubles(std::istream& in, double* data, std::size_t n) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw ParseError("unexpected end of binary file");
  }
}

}  // namespace ultratag::binary
