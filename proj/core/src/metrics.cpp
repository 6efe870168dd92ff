#include "sfcml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sfcml/errors.hpp"

namespace sfcml {

namespace {

bool contains(std::span<const std::uint32_t> sorted, std::uint32_t value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

void require_relevant(std::span<const std::uint32_t> relevant) {
  if (relevant.empty()) throw EmptyRelevantSetError("empty relevant set");
}

void append_row(std::string& out, const char* name, const std::string& k, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  out += name;
  out += '\t';
  out += k;
  out += '\t';
  out += buf;
  out += '\n';
}

}  // namespace

double precision_at_k(std::span<const std::uint32_t> topk,
                      std::span<const std::uint32_t> relevant, std::size_t k) {
  if (topk.size() != k) {
    throw IndexOutOfRangeError("precision@k needs exactly k ranked items");
  }
  std::size_t hits = 0;
  for (const std::uint32_t item : topk) hits += contains(relevant, item);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(std::span<const std::uint32_t> topk,
                   std::span<const std::uint32_t> relevant) {
  require_relevant(relevant);
  std::size_t hits = 0;
  for (const std::uint32_t item : topk) hits += contains(relevant, item);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const std::uint32_t> topk,
                 std::span<const std::uint32_t> relevant, std::size_t k) {
  require_relevant(relevant);
  double dcg = 0.0;
  for (std::size_t pos = 0; pos < topk.size(); ++pos) {
    if (contains(relevant, topk[pos])) {
      dcg += 1.0 / std::log2(static_cast<double>(pos + 2));
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, relevant.size());
  for (std::size_t pos = 0; pos < ideal; ++pos) {
    idcg += 1.0 / std::log2(static_cast<double>(pos + 2));
  }
  return dcg / idcg;
}

double average_precision(std::span<const std::uint32_t> full_ranking,
                         std::span<const std::uint32_t> relevant) {
  require_relevant(relevant);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t pos = 0; pos < full_ranking.size(); ++pos) {
    if (contains(relevant, full_ranking[pos])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(pos + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double reciprocal_rank_sum(std::span<const std::uint32_t> full_ranking,
                           std::span<const std::uint32_t> relevant) {
  require_relevant(relevant);
  double sum = 0.0;
  for (std::size_t pos = 0; pos < full_ranking.size(); ++pos) {
    if (contains(relevant, full_ranking[pos])) {
      sum += 1.0 / static_cast<double>(pos + 1);
    }
  }
  return sum;
}

double user_auc(std::span<const double> scores, std::span<const std::uint8_t> is_relevant) {
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (const std::uint8_t flag : is_relevant) positives += flag;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateCandidatesError("AUC needs at least one relevant and one non-relevant item");
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });

  // Rank sum with average ranks over tie groups; equals concordant pairs
  // plus half the tied pairs.
  double relevant_rank_sum = 0.0;
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end < n && scores[order[end]] == scores[order[pos]]) ++end;
    const double avg_rank = 0.5 * static_cast<double>(pos + 1 + end);  // 1-indexed
    for (std::size_t i = pos; i < end; ++i) {
      if (is_relevant[order[i]]) relevant_rank_sum += avg_rank;
    }
    pos = end;
  }
  const double p = static_cast<double>(positives);
  return (relevant_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

MetricsReport aggregate_report(std::span<const UserMetrics> per_user) {
  if (per_user.empty()) throw NoEvaluableUsersError("no users with a non-empty relevant set");
  MetricsReport report;
  report.users_evaluated = per_user.size();
  const double inv = 1.0 / static_cast<double>(per_user.size());
  for (const UserMetrics& u : per_user) {
    for (const auto& [k, v] : u.precision_at) report.precision_at[k] += v * inv;
    for (const auto& [k, v] : u.recall_at) report.recall_at[k] += v * inv;
    for (const auto& [k, v] : u.ndcg_at) report.ndcg_at[k] += v * inv;
    report.map_score += u.average_precision * inv;
    report.mrr_score += u.reciprocal_rank_sum * inv;
    report.auc_score += u.auc * inv;
  }
  return report;
}

std::string to_tsv(const MetricsReport& report) {
  std::string out = "metric\tk\tvalue\n";
  for (const auto& [k, v] : report.precision_at) append_row(out, "precision", std::to_string(k), v);
  for (const auto& [k, v] : report.recall_at) append_row(out, "recall", std::to_string(k), v);
  for (const auto& [k, v] : report.ndcg_at) append_row(out, "ndcg", std::to_string(k), v);
  append_row(out, "map", "-", report.map_score);
  append_row(out, "mrr", "-", report.mrr_score);
  append_row(out, "auc", "-", report.auc_score);
  out += "users_evaluated\t-\t" + std::to_string(report.users_evaluated) + "\n";
  return out;
}

}  // namespace sfcml
