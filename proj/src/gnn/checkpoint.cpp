#include "ultratag/gnn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ultratag/core/binary_io.hpp"
#include "ultratag/core/text.hpp"

namespace ultratag::gnn {

namespace {
constexpr char kMagic[8] = {'U', 'T', 'G', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint64_t kMaxDim = 1u << 24;
}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, sizeof(kMagic));
  binary::write<std::uint64_t>(out, ckpt.seed);
  binary::write<std::uint64_t>(out, ckpt.epoch);
  binary::write<std::uint64_t>(out, ckpt.models.size());
  for (const auto& p : ckpt.models) {
    binary::write<std::uint64_t>(out, p.layers());
    for (std::size_t l = 0; l < p.layers(); ++l) {
      binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(p.weights[l].rows()));
      binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(p.weights[l].cols()));
      binary::write_doubles(out, p.weights[l].data(), static_cast<std::size_t>(p.weights[l].size()));
      binary::write_doubles(out, p.biases[l].data(), static_cast<std::size_t>(p.biases[l].size()));
    }
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ParseError("not a checkpoint file");
  }
  Checkpoint ckpt;
  ckpt.seed = binary::read<std::uint64_t>(in);
  ckpt.epoch = binary::read<std::uint64_t>(in);
  const auto models = binary::read<std::uint64_t>(in);
  if (models > 16) throw ParseError("checkpoint model count out of range");
  for (std::uint64_t m = 0; m < models; ++m) {
    GcnParams p;
    const auto layers = binary::read<std::uint64_t>(in);
    if (layers == 0 || layers > 64) throw ParseError("checkpoint layer count out of range");
    for (std::uint64_t l = 0; l < layers; ++l) {
      const auto rows = binary::read<std::uint64_t>(in);
      const auto cols = binary::read<std::uint64_t>(in);
      if (rows == 0 || cols == 0 || rows > kMaxDim || cols > kMaxDim) throw ParseError("checkpoint shape out of range");
      DenseMatrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      RowVector b(static_cast<Eigen::Index>(cols));
      binary::read_doubles(in, w.data(), static_cast<std::size_t>(w.size()));
      binary::read_doubles(in, b.data(), static_cast<std::size_t>(b.size()));
      p.weights.push_back(std::move(w));
      p.biases.push_back(std::move(b));
    }
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("checkpoint: ") + e.what());
    }
    ckpt.models.push_back(std::move(p));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,train_loss,val_acc\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_decimal(r.train_loss) << ',' << format_decimal(r.val_acc) << '\n';
  }
}

}  // namespace ultratag::gnn
