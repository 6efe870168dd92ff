#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "sfcml/errors.hpp"
#include "sfcml/samplers.hpp"
#include "support/test_helpers.hpp"

using namespace sfcml;
using sfcml::testing::graph_from_flags;
using sfcml::testing::model_from_rows;

namespace {

SamplerConfig config_of(SamplerKind kind, std::uint32_t u, bool with_replacement = false) {
  SamplerConfig config;
  config.kind = kind;
  config.negatives_per_positive = u;
  config.with_replacement = with_replacement;
  return config;
}

const std::vector<std::uint32_t> kNoPopularity(64, 0);

}  // namespace

TEST_CASE("uniform draw with U = n- returns the whole unobserved set") {
  const EmbeddingModel model = make_model(1, 6, 3, 1.0, 1);
  const UserGraph g = graph_from_flags({1, 0, 1, 0, 0, 0});
  Rng rng(9);
  auto negatives = sample_negatives(config_of(SamplerKind::uniform, 4), model, 0, 0, g,
                                    kNoPopularity, rng);
  std::sort(negatives.begin(), negatives.end());
  CHECK(negatives == std::vector<std::uint32_t>{1, 3, 4, 5});
}

TEST_CASE("samplers are deterministic under a fixed seed") {
  const EmbeddingModel model = make_model(2, 30, 4, 1.0, 2);
  std::vector<std::uint8_t> y(30, 0);
  for (std::uint32_t j = 0; j < 30; j += 3) y[j] = 1;
  const UserGraph g = graph_from_flags(y);
  std::vector<std::uint32_t> popularity(30);
  for (std::uint32_t j = 0; j < 30; ++j) popularity[j] = j % 7;

  for (const SamplerKind kind : {SamplerKind::uniform, SamplerKind::popularity,
                                 SamplerKind::two_stage, SamplerKind::hard}) {
    Rng a(1234), b(1234);
    const auto first = sample_negatives(config_of(kind, 5), model, 0, 0, g, popularity, a);
    const auto second = sample_negatives(config_of(kind, 5), model, 0, 0, g, popularity, b);
    CHECK(first == second);
  }
}

TEST_CASE("samples are distinct and never collide with positives") {
  const EmbeddingModel model = make_model(1, 40, 4, 1.0, 3);
  std::vector<std::uint8_t> y(40, 0);
  for (std::uint32_t j = 0; j < 40; j += 4) y[j] = 1;
  const UserGraph g = graph_from_flags(y);
  std::vector<std::uint32_t> popularity(40);
  for (std::uint32_t j = 0; j < 40; ++j) popularity[j] = (j * 13) % 11;

  Rng rng(5);
  for (const SamplerKind kind : {SamplerKind::uniform, SamplerKind::popularity,
                                 SamplerKind::two_stage, SamplerKind::hard}) {
    for (int round = 0; round < 50; ++round) {
      const auto negatives = sample_negatives(config_of(kind, 6), model, 0, 0, g, popularity, rng);
      CHECK(negatives.size() == 6);
      std::set<std::uint32_t> unique(negatives.begin(), negatives.end());
      CHECK(unique.size() == 6);
      for (const std::uint32_t k : negatives) CHECK(g.preferences[k] == 0);
    }
  }
}

TEST_CASE("not enough negatives") {
  const EmbeddingModel model = make_model(1, 4, 2, 1.0, 4);
  const UserGraph g = graph_from_flags({1, 1, 1, 0});
  Rng rng(6);
  CHECK_THROWS_AS(
      sample_negatives(config_of(SamplerKind::uniform, 2), model, 0, 0, g, kNoPopularity, rng),
      NotEnoughNegativesError);
}

TEST_CASE("hard mining keeps the closest candidates") {
  // user at origin; negative distances: item1 -> 0.25, item2 -> 4.0
  const EmbeddingModel model =
      model_from_rows({{0.0, 0.0}}, {{0.1, 0.0}, {0.5, 0.0}, {2.0, 0.0}});
  const UserGraph g = graph_from_flags({1, 0, 0});
  SamplerConfig config = config_of(SamplerKind::hard, 1);
  config.candidate_multiplier = 2;  // pool covers both negatives
  Rng rng(7);
  const auto negatives = sample_negatives(config, model, 0, 0, g, kNoPopularity, rng);
  CHECK(negatives == std::vector<std::uint32_t>{1});
}

TEST_CASE("two-stage keeps the candidates most aligned with the positive") {
  // positive anchor (1, 0); candidates: item1 aligned, item2 orthogonal, item3 opposed
  const EmbeddingModel model = model_from_rows(
      {{1.0, 0.0}}, {{1.0, 0.0}, {0.9, 0.0}, {0.0, 0.9}, {-0.9, 0.0}});
  const UserGraph g = graph_from_flags({1, 0, 0, 0});
  SamplerConfig config = config_of(SamplerKind::two_stage, 1);
  config.candidate_multiplier = 3;  // pool covers every negative
  Rng rng(8);
  const auto negatives =
      sample_negatives(config, model, 0, 0, g, std::vector<std::uint32_t>(4, 0), rng);
  CHECK(negatives == std::vector<std::uint32_t>{1});
}

TEST_CASE("induced distribution: exhaustive draw recovers the ground truth") {
  const UserGraph g = graph_from_flags({1, 0, 0, 0, 0});
  const std::vector<std::vector<std::uint32_t>> negatives{{1, 2, 3, 4}};
  const SamplingDistribution induced = induced_distribution(negatives, g);
  const SamplingDistribution truth = uniform_ground_truth(g);
  CHECK(induced.support == truth.support);
  for (std::size_t i = 0; i < induced.mass.size(); ++i) {
    CHECK(induced.mass[i] == doctest::Approx(0.25).epsilon(1e-15));
  }
  CHECK(total_variation(induced, truth) <= 1e-12);
  CHECK(tv_against_uniform(induced) <= 1e-12);
}

TEST_CASE("induced distribution: partial draw and its hand-computed TV") {
  const UserGraph g = graph_from_flags({1, 0, 0, 0, 0});
  const std::vector<std::vector<std::uint32_t>> negatives{{1, 2}};
  const SamplingDistribution induced = induced_distribution(negatives, g);
  REQUIRE(induced.support.size() == 2);
  CHECK(induced.mass[0] == doctest::Approx(0.5));
  CHECK(induced.mass[1] == doctest::Approx(0.5));
  // 0.5*(2*|0.25 - 0.5| + 2*0.25)
  CHECK(tv_against_uniform(induced) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total_variation(uniform_ground_truth(g), induced) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("duplicate draws aggregate into one support entry") {
  const UserGraph g = graph_from_flags({1, 0, 0, 0, 0});
  const std::vector<std::vector<std::uint32_t>> negatives{{2, 2}};
  const SamplingDistribution induced = induced_distribution(negatives, g);
  REQUIRE(induced.support.size() == 1);
  CHECK(induced.support[0] == std::pair<std::uint32_t, std::uint32_t>{0, 2});
  CHECK(induced.mass[0] == doctest::Approx(1.0));
  CHECK(tv_against_uniform(induced) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("invalid samples are rejected") {
  const UserGraph g = graph_from_flags({1, 0, 1, 0});
  const std::vector<std::vector<std::uint32_t>> positive_as_negative{{2}, {1}};
  CHECK_THROWS_AS(induced_distribution(positive_as_negative, g), InvalidSampleError);
  const std::vector<std::vector<std::uint32_t>> missing_list{{1}};
  CHECK_THROWS_AS(induced_distribution(missing_list, g), InvalidSampleError);
}

TEST_CASE("total variation is symmetric, bounded, and zero only at equality") {
  Rng rng(99);
  const EmbeddingModel model = make_model(1, 24, 3, 1.0, 11);
  std::vector<std::uint8_t> y(24, 0);
  for (std::uint32_t j = 0; j < 24; j += 5) y[j] = 1;
  const UserGraph g = graph_from_flags(y);

  const SamplingDistribution truth = uniform_ground_truth(g);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<std::uint32_t>> lists;
    for (std::size_t p = 0; p < g.n_pos; ++p) {
      lists.push_back(sample_negatives(config_of(SamplerKind::uniform, 4), model, 0, 0, g,
                                       kNoPopularity, rng));
    }
    const SamplingDistribution induced = induced_distribution(lists, g);
    const double tv = total_variation(truth, induced);
    CHECK(tv == doctest::Approx(total_variation(induced, truth)).epsilon(1e-15));
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
    CHECK(tv == doctest::Approx(tv_against_uniform(induced)).epsilon(1e-14));
  }

  const SamplingDistribution other = uniform_ground_truth(graph_from_flags({1, 0, 0}));
  CHECK_THROWS_AS(total_variation(truth, other), MismatchedSpaceError);
}

TEST_CASE("uniform without replacement hits the 1 - U/n- closed form") {
  Rng rng(123);
  const EmbeddingModel model = make_model(1, 40, 3, 1.0, 12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 6 + rng.bounded(34);
    std::vector<std::uint8_t> y(n, 0);
    const std::size_t n_pos = 1 + rng.bounded(n / 2);
    for (std::size_t i = 0; i < n_pos; ++i) y[i] = 1;
    rng.shuffle(y);
    const UserGraph g = graph_from_flags(y);
    if (g.n_neg < 2) continue;
    const auto u = static_cast<std::uint32_t>(1 + rng.bounded(g.n_neg));

    std::vector<std::vector<std::uint32_t>> lists;
    for (std::size_t p = 0; p < g.n_pos; ++p) {
      lists.push_back(sample_negatives(config_of(SamplerKind::uniform, u),
                                       make_model(1, n, 3, 1.0, 13), 0, 0, g, kNoPopularity, rng));
    }
    const double expected = 1.0 - static_cast<double>(u) / static_cast<double>(g.n_neg);
    CHECK(std::abs(tv_against_uniform(induced_distribution(lists, g)) - expected) <= 1e-12);
  }
}

TEST_CASE("with-replacement popularity on a skewed profile exceeds the uniform TV") {
  const std::size_t n = 32;
  std::vector<std::uint8_t> y(n, 0);
  y[0] = 1;
  y[1] = 1;
  const UserGraph g = graph_from_flags(y);
  std::vector<std::uint32_t> popularity(n, 0);
  popularity[5] = 100000;  // nearly every weighted draw lands here
  const EmbeddingModel model = make_model(1, n, 3, 1.0, 14);
  const std::uint32_t u = 5;

  Rng rng(321);
  double popularity_tv = 0.0;
  const int rounds = 20;
  for (int round = 0; round < rounds; ++round) {
    std::vector<std::vector<std::uint32_t>> lists;
    for (std::size_t p = 0; p < g.n_pos; ++p) {
      lists.push_back(sample_negatives(config_of(SamplerKind::popularity, u, true), model, 0, 0, g,
                                       popularity, rng));
    }
    popularity_tv += tv_against_uniform(induced_distribution(lists, g));
  }
  popularity_tv /= rounds;
  const double uniform_tv = 1.0 - static_cast<double>(u) / static_cast<double>(g.n_neg);
  CHECK(popularity_tv > uniform_tv);
}
