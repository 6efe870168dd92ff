#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sfcml/laplacian.hpp"
#include "sfcml/model.hpp"
#include "sfcml/rng.hpp"

namespace sfcml {

enum class SamplerKind { uniform, popularity, two_stage, hard };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::uniform;
  std::uint32_t negatives_per_positive = 10;  // U
  // two_stage/hard candidate pool = U * multiplier; 0 = strategy default
  // (5 for two_stage, 10 for hard).
  std::uint32_t candidate_multiplier = 0;
  // Training samplers draw without replacement. The with-replacement variant
  // exists for the TV diagnostic, where duplicate draws collapse support mass
  // and expose the skew of a non-uniform sampler.
  bool with_replacement = false;
};

/// Default candidate pool factor per strategy (5 for two-stage, 10 for hard).
std::uint32_t default_candidate_multiplier(SamplerKind kind);

/// Draws U negatives for one (user, positive) interaction. Without
/// replacement the result is U distinct unobserved items; uniform draws
/// uniformly, popularity with probability proportional to count+1, two_stage
/// keeps the U popularity-drawn candidates with the largest inner product
/// against the positive, hard keeps the U uniform-drawn candidates closest to
/// the user. Ties break toward the lower item index.
std::vector<std::uint32_t> sample_negatives(const SamplerConfig& config,
                                            const EmbeddingModel& model, std::uint32_t user,
                                            std::uint32_t positive, const UserGraph& g,
                                            std::span<const std::uint32_t> popularity, Rng& rng);

/// Sparse per-user pair distribution over (positive, negative) index pairs.
struct SamplingDistribution {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> support;  // sorted
  std::vector<double> mass;                                      // aligned with support
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Distribution realized by one sampling round: mass 1/(n+ * U) per sampled
/// pair, duplicates aggregated. `negatives` holds one U-list per positive of
/// the user, in ascending positive-item order.
SamplingDistribution induced_distribution(
    std::span<const std::vector<std::uint32_t>> negatives, const UserGraph& g);

/// The full-support ground truth with mass 1/(n+ * n-) everywhere.
SamplingDistribution uniform_ground_truth(const UserGraph& g);

/// Total variation 0.5 * ||a - b||_1 over the full n+ x n- pair space.
double total_variation(const SamplingDistribution& a, const SamplingDistribution& b);

/// total_variation against the uniform ground truth without materializing it.
double tv_against_uniform(const SamplingDistribution& d);

}  // namespace sfcml
