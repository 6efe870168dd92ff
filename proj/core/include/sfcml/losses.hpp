#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sfcml/laplacian.hpp"
#include "sfcml/matrix.hpp"
#include "sfcml/model.hpp"

namespace sfcml {

enum class LossKind { hinge, square };

struct UserGradients {
  std::vector<double> user;  // d
  Matrix items;              // N x d
};

/// Per-user SFCML risk (f - margin*y)^T L (f - margin*y), equal to the
/// normalized pairwise square loss sum over all (positive, unobserved) pairs.
/// Theta(N) given the scores.
double sfcml_user_loss(std::span<const double> scores, const UserGraph& g, double margin);

/// Loss plus L*(f - margin*y), the shared kernel of the loss and both
/// gradients. `score_buf` must hold N entries and is clobbered.
struct SfcmlTerms {
  double loss = 0.0;
  std::vector<double> lap_residual;  // L * (f - margin*y)
};
SfcmlTerms sfcml_user_terms(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                            double margin, std::span<double> score_buf);

/// Analytic gradients of the per-user risk via the matrix-free products:
/// grad_user = 4 W_v^T (L r), grad_items = 4 (L r) e_u^T with r = f - margin*y.
/// Total cost Theta(N*d).
UserGradients sfcml_user_grads(const EmbeddingModel& model, std::uint32_t user,
                               const UserGraph& g, double margin);

/// Brute-force O(n+ n-) pairwise risk over every (positive, unobserved) pair,
/// on distances: hinge max(0, m + d(i,j) - d(i,k)) or square (m + d(i,j) - d(i,k))^2,
/// divided by n+ n-. Oracle only; refuses N > 2000.
double naive_pairwise_loss(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                           LossKind kind, double margin);

/// Term-by-term analytic gradients of the pairwise sum. Hinge differentiates
/// the distance form (pairs exactly on the margin contribute zero); square
/// differentiates the score-gap form (m - (f_j - f_k))^2, the same functional
/// the Laplacian route accelerates, and therefore equals sfcml_user_grads.
UserGradients naive_pairwise_grads(const EmbeddingModel& model, std::uint32_t user,
                                   const UserGraph& g, LossKind kind, double margin);

/// Mean hinge loss over explicit (positive item, negative item) triplets.
double sampled_hinge_loss(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                          std::span<const std::pair<std::uint32_t, std::uint32_t>> triplets,
                          double margin);

}  // namespace sfcml
