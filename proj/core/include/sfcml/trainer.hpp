#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfcml/dataset.hpp"
#include "sfcml/laplacian.hpp"
#include "sfcml/matrix.hpp"
#include "sfcml/metrics.hpp"
#include "sfcml/model.hpp"
#include "sfcml/samplers.hpp"

namespace sfcml {

enum class TrainMethod { sfcml, sampled };

struct TrainConfig {
  double learning_rate = 0.01;   // tuned set {0.001, 0.003, 0.005, 0.01, 0.03, 0.05}
  std::size_t epochs = 200;
  std::size_t batch_size = 256;  // users per batch
  double margin = 1.0;           // tuned set {1.0, 1.5, 2.0}
  std::size_t dim = 256;
  double radius = 1.0;
  std::size_t patience = 15;
  double improvement_epsilon = 1e-5;
  std::uint64_t seed = 42;
  TrainMethod method = TrainMethod::sfcml;
  SamplerConfig sampler;          // sampled method only
  // Strict per-user sequential updates instead of batching (the literal
  // per-user loop, with item projection after every user).
  bool sequential_updates = false;
};

struct AdagradState {
  Matrix accum_users;  // running sums of squared gradients
  Matrix accum_items;
  double epsilon = 1e-8;
};

AdagradState make_adagrad_state(std::size_t num_users, std::size_t num_items, std::size_t dim);

/// accum += grad^2; weight -= lr * grad / (sqrt(accum) + eps), elementwise.
void adagrad_step(std::span<double> weights, std::span<const double> grads,
                  std::span<double> accum, double learning_rate, double epsilon);

/// One pass over all users (shuffled by the epoch seed, processed in batches
/// of batch_size): per user the SFCML gradients are computed against the
/// batch-start snapshot, user rows step individually, item gradients are
/// summed in ascending user order and applied in one Adagrad step per batch,
/// and item rows are re-projected after each batch. All rows are projected at
/// epoch start and user rows again at epoch end. Returns the mean per-user
/// loss measured before updates.
double train_epoch_sfcml(EmbeddingModel& model, const InteractionMatrix& train,
                         std::span<const UserGraph> graphs, const TrainConfig& config,
                         AdagradState& state, std::size_t epoch_index);

/// Same loop shape for the sampling-based hinge baseline: per (user, positive)
/// interaction U negatives are drawn and hinge subgradients accumulated,
/// normalized per user by 1/(n+ * U). Returns the mean per-user sampled loss
/// measured before updates.
double train_epoch_sampled(EmbeddingModel& model, const InteractionMatrix& train,
                           std::span<const UserGraph> graphs,
                           std::span<const std::uint32_t> popularity, const TrainConfig& config,
                           AdagradState& state, std::size_t epoch_index);

/// True iff each of the last `patience` epochs failed to exceed the running
/// best by more than epsilon (strict inequality).
bool should_early_stop(std::span<const double> validation_history, std::size_t patience,
                       double epsilon);

enum class SplitPart { validation, test };
enum class MaskMode { masked, unmasked };

/// Ranking metrics of `part` positives. Masked mode removes the user's other
/// known positives from the candidate pool (train for validation; train and
/// validation for test); unmasked ranks over all N items.
MetricsReport evaluate(const EmbeddingModel& model, const DatasetSplit& split, SplitPart part,
                       std::span<const std::size_t> ks, MaskMode mask_mode);

struct TrainLogRow {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double val_auc = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  EmbeddingModel final_model;
  EmbeddingModel best_model;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_auc = 0.0;
  std::vector<TrainLogRow> log;
};

/// Full training loop with per-epoch validation AUC and early stopping.
/// Fully determined by (split, config).
TrainResult train(const DatasetSplit& split, const TrainConfig& config);

}  // namespace sfcml
