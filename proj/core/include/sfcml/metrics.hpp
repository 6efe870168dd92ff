#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sfcml {

/// Aggregated ranking metrics over a split. MRR sums reciprocal ranks of all
/// relevant items per user (it can exceed 1); everything else lies in [0, 1].
struct MetricsReport {
  std::map<std::size_t, double> precision_at;
  std::map<std::size_t, double> recall_at;
  std::map<std::size_t, double> ndcg_at;
  double map_score = 0.0;
  double mrr_score = 0.0;
  double auc_score = 0.0;
  std::size_t users_evaluated = 0;
};

// `relevant` arguments are sorted, duplicate-free item index lists.

/// |relevant ∩ topk| / k. Requires |topk| == k.
double precision_at_k(std::span<const std::uint32_t> topk,
                      std::span<const std::uint32_t> relevant, std::size_t k);

/// |relevant ∩ topk| / |relevant|.
double recall_at_k(std::span<const std::uint32_t> topk,
                   std::span<const std::uint32_t> relevant);

/// Binary-gain DCG/IDCG with 1-indexed positions: DCG sums 1/log2(pos+1) at
/// hit positions, IDCG sums the first min(k, |relevant|) weights.
double ndcg_at_k(std::span<const std::uint32_t> topk,
                 std::span<const std::uint32_t> relevant, std::size_t k);

/// Average of precision values at the ranks where relevant items occur,
/// over the full candidate ranking.
double average_precision(std::span<const std::uint32_t> full_ranking,
                         std::span<const std::uint32_t> relevant);

/// Sum over relevant items of 1/rank in the full ranking (not first-hit-only).
double reciprocal_rank_sum(std::span<const std::uint32_t> full_ranking,
                           std::span<const std::uint32_t> relevant);

/// Concordance probability: P(score of relevant > score of non-relevant),
/// ties at half credit, computed by a rank sum in O(N log N). `is_relevant`
/// flags each candidate in `scores`.
double user_auc(std::span<const double> scores, std::span<const std::uint8_t> is_relevant);

struct UserMetrics {
  std::map<std::size_t, double> precision_at;
  std::map<std::size_t, double> recall_at;
  std::map<std::size_t, double> ndcg_at;
  double average_precision = 0.0;
  double reciprocal_rank_sum = 0.0;
  double auc = 0.0;
};

/// Unweighted mean over evaluated users.
MetricsReport aggregate_report(std::span<const UserMetrics> per_user);

/// TSV rows (metric, K-or-dash, value at 6 decimals), plus a users_evaluated
/// count row.
std::string to_tsv(const MetricsReport& report);

}  // namespace sfcml
