#include "sfcml/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sfcml/errors.hpp"

namespace sfcml {

namespace {

std::vector<std::uint32_t> unobserved_items(const UserGraph& g) {
  std::vector<std::uint32_t> items;
  items.reserve(g.n_neg);
  for (std::uint32_t j = 0; j < g.num_items(); ++j) {
    if (!g.preferences[j]) items.push_back(j);
  }
  return items;
}

std::vector<std::uint32_t> draw_uniform(std::vector<std::uint32_t> pool, std::uint32_t count,
                                        bool with_replacement, Rng& rng) {
  std::vector<std::uint32_t> drawn;
  drawn.reserve(count);
  if (with_replacement) {
    for (std::uint32_t i = 0; i < count; ++i) {
      drawn.push_back(pool[rng.bounded(pool.size())]);
    }
  } else {
    rng.partial_shuffle(pool, count);
    drawn.assign(pool.begin(), pool.begin() + count);
  }
  return drawn;
}

std::vector<std::uint32_t> draw_weighted(const std::vector<std::uint32_t>& pool,
                                         std::span<const std::uint32_t> popularity,
                                         std::uint32_t count, bool with_replacement, Rng& rng) {
  // Add-one smoothing keeps every unobserved item reachable.
  std::vector<double> weights(pool.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    weights[i] = static_cast<double>(popularity[pool[i]]) + 1.0;
    total += weights[i];
  }
  std::vector<std::uint32_t> drawn;
  drawn.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    double target = rng.next_double() * total;
    std::size_t pick = pool.size() - 1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      target -= weights[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    drawn.push_back(pool[pick]);
    if (!with_replacement) {
      total -= weights[pick];
      weights[pick] = 0.0;
    }
  }
  return drawn;
}

/// Keeps the `count` candidates with the largest key, ties toward the lower
/// item index; result in selection order.
std::vector<std::uint32_t> keep_top(std::vector<std::uint32_t> candidates,
                                    const std::vector<double>& key, std::uint32_t count) {
  std::sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return a < b;
  });
  candidates.resize(count);
  return candidates;
}

}  // namespace

std::uint32_t default_candidate_multiplier(SamplerKind kind) {
  return kind == SamplerKind::hard ? 10 : 5;
}

std::vector<std::uint32_t> sample_negatives(const SamplerConfig& config,
                                            const EmbeddingModel& model, std::uint32_t user,
                                            std::uint32_t positive, const UserGraph& g,
                                            std::span<const std::uint32_t> popularity, Rng& rng) {
  const std::uint32_t count = config.negatives_per_positive;
  if (count == 0) throw InvalidValueError("negatives_per_positive must be >= 1");
  if (g.n_neg < count) {
    throw NotEnoughNegativesError("user " + std::to_string(user) + " has n-=" +
                                  std::to_string(g.n_neg) + " < U=" + std::to_string(count));
  }

  const std::uint32_t multiplier = config.candidate_multiplier != 0
                                       ? config.candidate_multiplier
                                       : default_candidate_multiplier(config.kind);

  switch (config.kind) {
    case SamplerKind::uniform:
      return draw_uniform(unobserved_items(g), count, config.with_replacement, rng);
    case SamplerKind::popularity:
      return draw_weighted(unobserved_items(g), popularity, count, config.with_replacement, rng);
    case SamplerKind::two_stage: {
      const auto pool = unobserved_items(g);
      const auto pool_size = static_cast<std::uint32_t>(
          std::min<std::uint64_t>(pool.size(),
                                  static_cast<std::uint64_t>(count) * multiplier));
      auto candidates = draw_weighted(pool, popularity, pool_size, false, rng);
      std::vector<double> affinity(g.num_items(), 0.0);
      const auto anchor = model.items.row(positive);
      for (const std::uint32_t c : candidates) affinity[c] = dot(anchor, model.items.row(c));
      return keep_top(std::move(candidates), affinity, count);
    }
    case SamplerKind::hard: {
      const auto pool_size = static_cast<std::uint32_t>(
          std::min<std::uint64_t>(g.n_neg, static_cast<std::uint64_t>(count) * multiplier));
      auto candidates = draw_uniform(unobserved_items(g), pool_size, false, rng);
      std::vector<double> closeness(g.num_items(), 0.0);
      for (const std::uint32_t c : candidates) closeness[c] = -distance(model, user, c);
      return keep_top(std::move(candidates), closeness, count);
    }
  }
  throw InvalidValueError("unknown sampler kind");
}

SamplingDistribution induced_distribution(
    std::span<const std::vector<std::uint32_t>> negatives, const UserGraph& g) {
  if (g.n_pos == 0 || g.n_neg == 0) throw DegenerateGraphError("degenerate user graph");
  if (negatives.size() != g.n_pos) {
    throw InvalidSampleError("need exactly one negative list per positive");
  }
  std::vector<std::uint32_t> positive_items;
  positive_items.reserve(g.n_pos);
  for (std::uint32_t j = 0; j < g.num_items(); ++j) {
    if (g.preferences[j]) positive_items.push_back(j);
  }
  const std::size_t per_positive = negatives.empty() ? 0 : negatives[0].size();

  std::map<std::pair<std::uint32_t, std::uint32_t>, double> aggregated;
  for (std::size_t p = 0; p < negatives.size(); ++p) {
    if (negatives[p].size() != per_positive || per_positive == 0) {
      throw InvalidSampleError("every positive needs the same nonzero negative count");
    }
    for (const std::uint32_t k : negatives[p]) {
      if (k >= g.num_items()) throw IndexOutOfRangeError("negative item " + std::to_string(k));
      if (g.preferences[k]) {
        throw InvalidSampleError("sampled negative " + std::to_string(k) + " is a positive");
      }
      aggregated[{positive_items[p], k}] += 1.0;
    }
  }
  SamplingDistribution dist;
  dist.n_pos = g.n_pos;
  dist.n_neg = g.n_neg;
  const double mass_per_draw =
      1.0 / (static_cast<double>(g.n_pos) * static_cast<double>(per_positive));
  dist.support.reserve(aggregated.size());
  dist.mass.reserve(aggregated.size());
  for (const auto& [pair, draws] : aggregated) {
    dist.support.push_back(pair);
    dist.mass.push_back(draws * mass_per_draw);
  }
  return dist;
}

SamplingDistribution uniform_ground_truth(const UserGraph& g) {
  if (g.n_pos == 0 || g.n_neg == 0) throw DegenerateGraphError("degenerate user graph");
  SamplingDistribution dist;
  dist.n_pos = g.n_pos;
  dist.n_neg = g.n_neg;
  const double mass = 1.0 / (static_cast<double>(g.n_pos) * static_cast<double>(g.n_neg));
  dist.support.reserve(g.n_pos * g.n_neg);
  for (std::uint32_t j = 0; j < g.num_items(); ++j) {
    if (!g.preferences[j]) continue;
    for (std::uint32_t k = 0; k < g.num_items(); ++k) {
      if (g.preferences[k]) continue;
      dist.support.emplace_back(j, k);
    }
  }
  dist.mass.assign(dist.support.size(), mass);
  return dist;
}

double total_variation(const SamplingDistribution& a, const SamplingDistribution& b) {
  if (a.n_pos != b.n_pos || a.n_neg != b.n_neg) {
    throw MismatchedSpaceError("distributions cover different (n+, n-) pair spaces");
  }
  double l1 = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.support.size() || j < b.support.size()) {
    if (j >= b.support.size() || (i < a.support.size() && a.support[i] < b.support[j])) {
      l1 += std::abs(a.mass[i]);
      ++i;
    } else if (i >= a.support.size() || b.support[j] < a.support[i]) {
      l1 += std::abs(b.mass[j]);
      ++j;
    } else {
      l1 += std::abs(a.mass[i] - b.mass[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * l1;
}

double tv_against_uniform(const SamplingDistribution& d) {
  const double uniform_mass = 1.0 / (static_cast<double>(d.n_pos) * static_cast<double>(d.n_neg));
  double l1 = 0.0;
  for (const double m : d.mass) l1 += std::abs(m - uniform_mass);
  const double absent =
      static_cast<double>(d.n_pos) * static_cast<double>(d.n_neg) - static_cast<double>(d.support.size());
  l1 += absent * uniform_mass;
  return 0.5 * l1;
}

}  // namespace sfcml
