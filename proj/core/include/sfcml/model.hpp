#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sfcml/matrix.hpp"

namespace sfcml {

/// User and item embedding tables constrained to the radius-R hypersphere
/// (||e||^2 = R after projection). On the sphere, d(i,j) = 2R - f_j where
/// f_j = 2<e_u, e_v> is the score, so distance and score rankings coincide.
struct EmbeddingModel {
  Matrix users;  // M x d
  Matrix items;  // N x d
  double radius = 1.0;

  std::size_t num_users() const { return users.rows(); }
  std::size_t num_items() const { return items.rows(); }
  std::size_t dim() const { return users.cols(); }
};

enum class ProjectionTarget { users, items, both };

/// Fresh model with i.i.d. Gaussian(0, 0.01) entries projected to the sphere.
EmbeddingModel make_model(std::size_t num_users, std::size_t num_items, std::size_t dim,
                          double radius, std::uint64_t seed);

/// Rescales the selected rows to Euclidean norm sqrt(R). Rows with norm below
/// 1e-12 are resampled from Gaussian(0, 0.01) first and then rescaled.
void project_to_sphere(EmbeddingModel& model, ProjectionTarget which);

/// Scores of user i toward every item: f_j = 2 <e_u, e_vj>.
void score_user(const EmbeddingModel& model, std::uint32_t user, std::span<double> out);
std::vector<double> score_vector(const EmbeddingModel& model, std::uint32_t user);

/// Squared Euclidean distance ||e_u - e_v||^2.
double distance(const EmbeddingModel& model, std::uint32_t user, std::uint32_t item);

/// The k closest unmasked items for user i (score -d, descending), ties
/// broken by ascending item index. `mask` must be sorted and duplicate-free.
std::vector<std::uint32_t> rank_top_k(const EmbeddingModel& model, std::uint32_t user,
                                      std::size_t k, std::span<const std::uint32_t> mask);

/// Text checkpoint: header "sfcml-embeddings v1 M N d R", then M user rows
/// and N item rows of tab-separated values at 17 significant digits
/// (round-trip exact for 64-bit reals).
void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_checkpoint(const std::filesystem::path& path);

}  // namespace sfcml
