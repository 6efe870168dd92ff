#include <doctest.h>

#include <cmath>
#include <vector>

#include "sfcml/errors.hpp"
#include "sfcml/metrics.hpp"
#include "sfcml/rng.hpp"
#include "support/test_helpers.hpp"

using namespace sfcml;
using sfcml::testing::brute_force_auc;

namespace {
using Items = std::vector<std::uint32_t>;
}

TEST_CASE("precision at k") {
  const Items topk{1, 2, 3, 4, 5};
  CHECK(precision_at_k(topk, Items{2, 4, 9, 11}, 5) == doctest::Approx(0.4));
  CHECK(precision_at_k(topk, Items{9, 11}, 5) == 0.0);
  CHECK(precision_at_k(topk, Items{1, 2, 3, 4, 5}, 5) == 1.0);
  CHECK_THROWS(precision_at_k(topk, Items{1}, 3));  // |topk| != k
}

TEST_CASE("recall at k") {
  const Items topk{1, 2, 3};
  CHECK(recall_at_k(topk, Items{2, 3, 8, 9}) == doctest::Approx(0.5));
  CHECK(recall_at_k(topk, Items{1, 3}) == 1.0);
  CHECK(recall_at_k(topk, Items{7, 8}) == 0.0);
  CHECK_THROWS_AS(recall_at_k(topk, Items{}), EmptyRelevantSetError);
}

TEST_CASE("ndcg at k") {
  CHECK(ndcg_at_k(Items{4, 7, 9}, Items{4}, 3) == 1.0);
  // single relevant item at position 2 of 3
  CHECK(ndcg_at_k(Items{7, 4, 9}, Items{4}, 3) ==
        doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
  CHECK(ndcg_at_k(Items{7, 8, 9}, Items{4}, 3) == 0.0);
  CHECK_THROWS_AS(ndcg_at_k(Items{1}, Items{}, 1), EmptyRelevantSetError);
}

TEST_CASE("ndcg is 1 exactly when the top positions are all relevant") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.bounded(30);
    const std::size_t k = 1 + rng.bounded(n);
    Items ranking(n);
    for (std::size_t j = 0; j < n; ++j) ranking[j] = static_cast<std::uint32_t>(j);
    rng.shuffle(ranking);
    Items relevant;
    for (std::uint32_t j = 0; j < n; ++j) {
      if (rng.bounded(3) == 0) relevant.push_back(j);
    }
    if (relevant.empty()) relevant.push_back(ranking[rng.bounded(n)]);
    std::sort(relevant.begin(), relevant.end());

    const Items topk(ranking.begin(), ranking.begin() + k);
    const double value = ndcg_at_k(topk, relevant, k);
    CHECK(value <= 1.0 + 1e-12);
    const std::size_t ideal = std::min(k, relevant.size());
    bool top_all_relevant = true;
    for (std::size_t p = 0; p < ideal; ++p) {
      top_all_relevant &= std::binary_search(relevant.begin(), relevant.end(), topk[p]);
    }
    // Extra hits beyond `ideal` positions are impossible; equality holds iff
    // the first min(K, |relevant|) slots are all hits.
    CHECK((value >= 1.0 - 1e-12) == top_all_relevant);
  }
}

TEST_CASE("average precision") {
  // relevant at ranks 1 and 3
  CHECK(average_precision(Items{4, 9, 6, 8}, Items{4, 6}) ==
        doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK(average_precision(Items{4, 6, 9, 8}, Items{4, 6}) == 1.0);
  CHECK(average_precision(Items{9, 8, 7, 4}, Items{4}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(average_precision(Items{1}, Items{}), EmptyRelevantSetError);
}

TEST_CASE("reciprocal rank sum") {
  CHECK(reciprocal_rank_sum(Items{9, 4, 8, 6}, Items{4, 6}) == doctest::Approx(0.75));
  CHECK(reciprocal_rank_sum(Items{4, 9, 8}, Items{4}) == 1.0);
  Items ranking(10);
  for (std::uint32_t j = 0; j < 10; ++j) ranking[j] = j;
  CHECK(reciprocal_rank_sum(ranking, Items{9}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(reciprocal_rank_sum(ranking, Items{}), EmptyRelevantSetError);
}

TEST_CASE("user AUC basics") {
  const std::vector<double> scores{3.0, 2.0, 1.0, 0.5};
  CHECK(user_auc(scores, std::vector<std::uint8_t>{1, 1, 0, 0}) == 1.0);
  CHECK(user_auc(scores, std::vector<std::uint8_t>{0, 0, 1, 1}) == 0.0);
  // one relevant above 2 of 3 non-relevant
  const std::vector<double> s2{1.0, 2.0, 0.5, 0.1};
  CHECK(user_auc(s2, std::vector<std::uint8_t>{1, 0, 0, 0}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(user_auc(scores, std::vector<std::uint8_t>{1, 1, 1, 1}),
                  DegenerateCandidatesError);
  CHECK_THROWS_AS(user_auc(scores, std::vector<std::uint8_t>{0, 0, 0, 0}),
                  DegenerateCandidatesError);
}

TEST_CASE("ties get half credit") {
  const std::vector<double> scores{1.0, 1.0};
  CHECK(user_auc(scores, std::vector<std::uint8_t>{1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("rank-sum AUC equals brute-force concordance counting") {
  Rng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.bounded(199);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      // Coarse grid scores force plenty of exact ties.
      scores[j] = static_cast<double>(rng.bounded(8)) * 0.25;
      flags[j] = static_cast<std::uint8_t>(rng.bounded(2));
    }
    flags[0] = 1;
    flags[1] = 0;
    CHECK(std::abs(user_auc(scores, flags) - brute_force_auc(scores, flags)) <= 1e-12);
  }
}

TEST_CASE("complement symmetry without ties") {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.bounded(50);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      scores[j] = rng.normal(0.0, 1.0);
      flags[j] = static_cast<std::uint8_t>(rng.bounded(2));
    }
    flags[0] = 1;
    flags[1] = 0;
    std::vector<double> negated(n);
    for (std::size_t j = 0; j < n; ++j) negated[j] = -scores[j];
    CHECK(user_auc(scores, flags) + user_auc(negated, flags) == doctest::Approx(1.0));
  }
}

TEST_CASE("metrics are invariant under strictly increasing score transforms") {
  Rng rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.bounded(40);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      scores[j] = rng.normal(0.0, 1.0);
      flags[j] = static_cast<std::uint8_t>(rng.bounded(2));
    }
    flags[0] = 1;
    flags[1] = 0;
    std::vector<double> warped(n);
    for (std::size_t j = 0; j < n; ++j) warped[j] = std::exp(scores[j]) * 3.0 + 1.0;
    CHECK(std::abs(user_auc(scores, flags) - user_auc(warped, flags)) <= 1e-12);
  }
}

TEST_CASE("consistency triple: hits via precision equals hits via recall") {
  Rng rng(66);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + rng.bounded(30);
    const std::size_t k = 1 + rng.bounded(n);
    Items ranking(n);
    for (std::uint32_t j = 0; j < n; ++j) ranking[j] = j;
    rng.shuffle(ranking);
    Items relevant;
    for (std::uint32_t j = 0; j < n; ++j) {
      if (rng.bounded(4) == 0) relevant.push_back(j);
    }
    if (relevant.empty()) relevant.push_back(0);
    std::sort(relevant.begin(), relevant.end());
    const Items topk(ranking.begin(), ranking.begin() + k);

    const double p = precision_at_k(topk, relevant, k);
    const double r = recall_at_k(topk, relevant);
    const double hits_p = p * static_cast<double>(k);
    const double hits_r = r * static_cast<double>(relevant.size());
    CHECK(hits_p == doctest::Approx(hits_r).epsilon(1e-12));
    CHECK(hits_p == doctest::Approx(std::round(hits_p)).epsilon(1e-12));
  }
}

TEST_CASE("report aggregation") {
  UserMetrics a, b;
  a.auc = 0.8;
  b.auc = 1.0;
  a.precision_at[3] = 0.5;
  b.precision_at[3] = 0.25;
  a.average_precision = 0.5;
  b.average_precision = 0.7;
  a.reciprocal_rank_sum = 1.5;
  b.reciprocal_rank_sum = 0.5;
  const std::vector<UserMetrics> both{a, b};
  const MetricsReport report = aggregate_report(both);
  CHECK(report.auc_score == doctest::Approx(0.9));
  CHECK(report.precision_at.at(3) == doctest::Approx(0.375));
  CHECK(report.map_score == doctest::Approx(0.6));
  CHECK(report.mrr_score == doctest::Approx(1.0));
  CHECK(report.users_evaluated == 2);

  const std::vector<UserMetrics> single{a};
  CHECK(aggregate_report(single).auc_score == doctest::Approx(0.8));
  CHECK_THROWS_AS(aggregate_report({}), NoEvaluableUsersError);
}

TEST_CASE("report TSV layout") {
  UserMetrics u;
  u.precision_at[3] = 0.5;
  u.recall_at[3] = 0.25;
  u.ndcg_at[3] = 0.75;
  u.average_precision = 0.125;
  u.reciprocal_rank_sum = 1.25;
  u.auc = 0.875;
  const std::vector<UserMetrics> users{u};
  const std::string tsv = to_tsv(aggregate_report(users));
  CHECK(tsv ==
        "metric\tk\tvalue\n"
        "precision\t3\t0.500000\n"
        "recall\t3\t0.250000\n"
        "ndcg\t3\t0.750000\n"
        "map\t-\t0.125000\n"
        "mrr\t-\t1.250000\n"
        "auc\t-\t0.875000\n"
        "users_evaluated\t-\t1\n");
}
