#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ultratag/gnn/gcn.hpp"

namespace ultratag::gnn {

struct Checkpoint {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::vector<GcnParams> models;  ///< one entry for GCN/MLP, two for dual (gnn1, gnn2)
};

// Little-endian binary: "UTGCKPT1", seed u64, epoch u64, model count u64,
// then per model: layer count u64 and per layer rows u64, cols u64,
// rows*cols f64 weights, cols f64 bias.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// "epoch,train_loss,val_acc" with shortest round-trip numbers.
void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace ultratag::gnn
