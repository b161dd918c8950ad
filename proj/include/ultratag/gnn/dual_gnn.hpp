#pragma once

#include <span>
#include <vector>

#include "ultratag/gnn/gcn.hpp"

namespace ultratag::gnn {

/// Cosine similarity of the rows of `h1` clamped to [0, 1] with a zero
/// diagonal. Zero rows have zero similarity to everything. Entries at or
/// below `threshold` are zeroed (0 keeps the plain clamp).
DenseMatrix similarity_matrix(const DenseMatrix& h1, double threshold = 0.0);

/// Adds `s` to `a_star` on every pair with at least one endpoint outside
/// `selected`; pairs inside selected x selected keep `a_star` unchanged.
DenseMatrix fuse_adjacency(const DenseMatrix& a_star, const DenseMatrix& s, std::span<const NodeId> selected);

/// 1 where fuse_adjacency adds similarity, 0 on selected x selected.
DenseMatrix fuse_mask(std::size_t num_nodes, std::span<const NodeId> selected);

struct DualGnnModel {
  GcnParams gnn1;  ///< structure learner, output width = feature width
  GcnParams gnn2;  ///< classifier, output width = class count
  AdamState opt1;
  AdamState opt2;
  std::size_t epoch = 0;
  std::size_t best_epoch = 0;
  std::uint64_t seed = 0;
};

/// Fixed inputs of the joint objective.
class DualObjective {
 public:
  DualObjective(DenseMatrix features, const EdgeSet& a_star, std::span<const NodeId> selected,
                double sim_threshold = 0.0);

  struct Forward {
    GcnTape tape1;
    GcnTape tape2;
    DenseMatrix h1;
    DenseMatrix unit_rows;   ///< h1 with L2-normalized rows
    ColVector row_norms;
    DenseMatrix cosine;      ///< unit_rows * unit_rows^T
    DenseMatrix similarity;  ///< clamped cosine, zero diagonal
    DenseMatrix fused;       ///< weighted adjacency fed to GNN2
    DenseMatrix fused_norm;
    DenseMatrix logits;
  };

  Forward forward(const GcnParams& gnn1, const GcnParams& gnn2, double dropout, Rng* rng, bool train_mode) const;

  struct Gradients {
    GcnParams gnn1;
    GcnParams gnn2;
  };
  /// Chain rule through GNN2, sym_normalize of the fused adjacency, the
  /// similarity clamp and row normalization, back into GNN1.
  Gradients backward(const GcnParams& gnn1, const GcnParams& gnn2, const Forward& fwd,
                     const DenseMatrix& grad_logits) const;

  const DenseMatrix& features() const noexcept { return features_; }
  const DenseMatrix& a_star() const noexcept { return a_star_; }
  const DenseMatrix& a_star_norm() const noexcept { return a_star_norm_; }

 private:
  DenseMatrix features_;
  DenseMatrix a_star_;
  DenseMatrix a_star_norm_;
  DenseMatrix mask_;
  double sim_threshold_ = 0.0;
};

struct DualTrainResult {
  DualGnnModel model;
  std::vector<EpochRecord> history;
};

/// Joint training of both GNNs on the train-split cross entropy.
DualTrainResult train_dual(const DenseMatrix& features, const EdgeSet& a_star, std::span<const NodeId> selected,
                           std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                           std::size_t num_classes, const TrainConfig& cfg);

std::vector<ClassId> predict(const DualGnnModel& model, const DualObjective& objective);

}  // namespace ultratag::gnn
