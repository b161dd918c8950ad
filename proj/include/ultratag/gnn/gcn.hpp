#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ultratag/core/graph.hpp"
#include "ultratag/core/rng.hpp"
#include "ultratag/gnn/dense.hpp"

namespace ultratag::gnn {

struct GcnParams {
  std::vector<DenseMatrix> weights;
  std::vector<RowVector> biases;

  std::size_t layers() const noexcept { return weights.size(); }
  std::size_t input_dim() const { return static_cast<std::size_t>(weights.front().rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights.back().cols()); }
  /// Same shapes, all zeros.
  GcnParams zeros_like() const;
  /// Throws std::invalid_argument if chained dimensions disagree.
  void validate() const;

  friend bool operator==(const GcnParams& a, const GcnParams& b);
};

/// Glorot-uniform weights, zero biases; dims = {in, hidden..., out}.
GcnParams init_gcn(const std::vector<std::size_t>& dims, Rng& rng);

struct TrainConfig {
  double learning_rate = 1e-2;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  std::size_t epochs = 100;
  std::uint64_t seed = 42;
  std::size_t hidden = 64;
  std::size_t layers = 2;
  /// Structure learning drops similarities at or below this value.
  double sim_threshold = 0.8;
  /// Only "f64" is supported.
  std::string float_mode = "f64";

  void validate() const;
};

/// Intermediate values kept by a forward pass for the backward pass.
struct GcnTape {
  std::vector<DenseMatrix> inputs;     ///< layer inputs after dropout
  std::vector<DenseMatrix> keep_masks; ///< scaled dropout masks (empty when off)
  std::vector<DenseMatrix> projected;  ///< inputs[l] * W_l
  std::vector<DenseMatrix> pre_activations;
};

/// Graph convolution stack: each layer computes A_hat * X * W + b, ReLU on
/// all but the last. Dropout hits every layer input in train mode.
DenseMatrix gcn_forward(const DenseMatrix& a_hat, const DenseMatrix& features, const GcnParams& params,
                        double dropout, Rng* rng, bool train_mode, GcnTape* tape = nullptr);

/// Reverse pass; returns parameter gradients and, when `grad_a_hat` is
/// non-null, accumulates dL/dA_hat into it.
GcnParams gcn_backward(const DenseMatrix& a_hat, const GcnParams& params, const GcnTape& tape,
                       const DenseMatrix& grad_logits, DenseMatrix* grad_a_hat = nullptr);

struct LossWithGrad {
  double loss = 0.0;
  DenseMatrix grad_logits;
};

/// Mean negative log-softmax of the true class over `mask`.
/// Throws std::invalid_argument on an empty mask or an unlabeled node.
double cross_entropy(const DenseMatrix& logits, std::span<const std::optional<ClassId>> labels,
                     std::span<const NodeId> mask);
LossWithGrad cross_entropy_with_grad(const DenseMatrix& logits, std::span<const std::optional<ClassId>> labels,
                                     std::span<const NodeId> mask);

/// Adam with decoupled weight decay (beta1 0.9, beta2 0.999, eps 1e-8).
struct AdamState {
  GcnParams m;
  GcnParams v;
  std::size_t step = 0;

  static AdamState for_params(const GcnParams& p) { return {p.zeros_like(), p.zeros_like(), 0}; }
};
void adam_step(GcnParams& params, const GcnParams& grads, AdamState& state, double lr, double weight_decay);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
  /// Largest |gradient| over GNN1 parameters (dual training only).
  double gnn1_grad_max_abs = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct GcnModel {
  GcnParams params;
  AdamState optimizer;
  std::size_t best_epoch = 0;
  std::uint64_t seed = 0;
};

struct GcnTrainResult {
  GcnModel model;
  std::vector<EpochRecord> history;
};

/// Full-batch training of a single GCN on a fixed normalized adjacency.
/// Keeps the parameters with the best validation accuracy (last epoch when
/// the validation split is empty).
GcnTrainResult train_gcn(const DenseMatrix& features, const DenseMatrix& a_hat,
                         std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                         std::size_t num_classes, const TrainConfig& cfg);

/// Plain GCN on an edge set (symmetric normalization with self-loops).
GcnTrainResult train_gcn(const DenseMatrix& features, const EdgeSet& edges,
                         std::span<const std::optional<ClassId>> labels, const SplitMasks& splits,
                         std::size_t num_classes, const TrainConfig& cfg);

/// MLP baseline: the same stack with an identity propagation matrix.
GcnTrainResult train_mlp(const DenseMatrix& features, std::span<const std::optional<ClassId>> labels,
                         const SplitMasks& splits, std::size_t num_classes, const TrainConfig& cfg);

/// Dropout-free argmax predictions.
std::vector<ClassId> predict(const GcnParams& params, const DenseMatrix& features, const DenseMatrix& a_hat);

/// Flat view of all parameters (weights then bias per layer).
std::vector<double> flatten(const GcnParams& p);
void unflatten(std::span<const double> flat, GcnParams& p);

}  // namespace ultratag::gnn
