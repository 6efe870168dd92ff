#pragma once

#include <cstdint>
#include <vector>

#include "sfcml/laplacian.hpp"
#include "sfcml/losses.hpp"
#include "sfcml/model.hpp"

namespace sfcml {

/// A random projected single-user instance for oracle checks.
struct SyntheticInstance {
  EmbeddingModel model;
  UserGraph graph;
  std::uint32_t user = 0;
};

/// Random instance with N in [min_items, max_items], d in [min_dim, max_dim],
/// 0 < n+ < N, entries Gaussian, rows projected to the unit sphere.
SyntheticInstance make_synthetic_instance(std::uint64_t seed, std::size_t min_items,
                                          std::size_t max_items, std::size_t min_dim,
                                          std::size_t max_dim);

/// Central finite differences of the per-user SFCML risk with respect to the
/// user row and every item row; independent of the analytic gradient path
/// (only loss evaluations).
UserGradients finite_difference_grads(EmbeddingModel model, std::uint32_t user,
                                      const UserGraph& g, double margin, double step);

/// Central finite differences of the naive pairwise risk (hinge or square).
UserGradients finite_difference_naive_grads(EmbeddingModel model, std::uint32_t user,
                                            const UserGraph& g, LossKind kind, double margin,
                                            double step);

/// max |a-b| / max(1, ||b||_inf) across user gradient and item gradient rows.
double gradient_relative_error(const UserGradients& a, const UserGradients& b);

struct VerifyOptions {
  std::size_t trials = 1000;
  std::size_t max_items = 200;
  std::uint64_t seed = 1;
};

struct VerifyReport {
  // Laplacian algebra against the dense oracle.
  double lap_dense_max_abs = 0.0;
  double lap_rowsum_max_abs = 0.0;    // |L*1|_inf
  double lap_symmetry_max_abs = 0.0;  // |<u,Lv> - <Lu,v>|
  double lap_psd_min = 0.0;           // min v^T L v
  // |sfcml_user_loss - naive_pairwise_loss(square)| / max(1, naive).
  double loss_equivalence_max_rel = 0.0;
  // sfcml_user_grads vs naive_pairwise_grads(square) and finite differences.
  double grad_vs_naive_max_rel = 0.0;
  double grad_vs_fd_max_rel = 0.0;

  bool passed() const;
};

// Pinned tolerances.
inline constexpr double kLaplacianTolerance = 1e-12;
inline constexpr double kLossEquivalenceTolerance = 1e-9;
inline constexpr double kGradNaiveTolerance = 1e-9;
inline constexpr double kGradFdTolerance = 1e-4;
inline constexpr double kFdStep = 1e-4;

VerifyReport run_laplacian_suite(const VerifyOptions& options);
VerifyReport run_loss_equivalence_suite(const VerifyOptions& options);
VerifyReport run_gradient_suite(const VerifyOptions& options);

/// All three suites, errors merged.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace sfcml
