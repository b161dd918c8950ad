#include <cstring>
#include <fstream>
#include <sstream>

#include "ultratag/core/binary_io.hpp"
#include "ultratag/core/hash.hpp"
#include "ultratag/core/text.hpp"
#include "ultratag/embed/embedder.hpp"

namespace ultratag::embed {

namespace {
constexpr char kMagic[8] = {'U', 'T', 'G', 'E', 'M', 'B', '0', '1'};

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".sha256";
  return p;
}
}  // namespace

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  std::ostringstream buf(std::ios::binary);
  buf.write(kMagic, sizeof(kMagic));
  binary::write<std::uint64_t>(buf, m.rows());
  binary::write<std::uint64_t>(buf, m.dim());
  binary::write<std::uint32_t>(buf, sizeof(double));
  binary::write_doubles(buf, m.values.data(), static_cast<std::size_t>(m.values.size()));
  const std::string bytes = buf.str();

  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::ofstream sum(sidecar(path));
  sum << sha256_hex(bytes) << '\n';
  if (!out || !sum) throw std::runtime_error("cannot write embeddings " + path.string());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embeddings " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();

  std::ifstream sum_in(sidecar(path));
  std::string expected;
  if (!(sum_in >> expected)) throw ParseError("missing checksum sidecar for " + path.string());
  if (sha256_hex(bytes) != expected) throw ParseError("checksum mismatch for " + path.string());

  std::istringstream body(bytes, std::ios::binary);
  char magic[8];
  if (!body.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ParseError("not an embedding file: " + path.string());
  }
  const auto rows = binary::read<std::uint64_t>(body);
  const auto cols = binary::read<std::uint64_t>(body);
  const auto width = binary::read<std::uint32_t>(body);
  if (width != sizeof(double)) throw ParseError("unsupported float width " + std::to_string(width));
  if (bytes.size() != sizeof(kMagic) + 20 + rows * cols * sizeof(double)) throw ParseError("embedding file size mismatch");
  EmbeddingMatrix m{DenseMatrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))};
  binary::read_doubles(body, m.values.data(), rows * cols);
  return m;
}

}  // namespace ultratag::embed
