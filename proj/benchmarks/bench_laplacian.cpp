#include <benchmark/benchmark.h>

#include <vector>

#include "sfcml/laplacian.hpp"
#include "sfcml/rng.hpp"

namespace {

sfcml::UserGraph graph_of(std::size_t n, std::size_t n_pos, std::uint64_t seed) {
  std::vector<std::uint32_t> items(n);
  for (std::size_t j = 0; j < n; ++j) items[j] = static_cast<std::uint32_t>(j);
  sfcml::Rng rng(seed);
  rng.partial_shuffle(items, n_pos);
  items.resize(n_pos);
  std::sort(items.begin(), items.end());
  return sfcml::make_user_graph(items, n);
}

/// O(N^2) row-wise product with on-the-fly Laplacian entries; the quadratic
/// baseline the matrix-free kernel is measured against.
void dense_rowwise_product(const sfcml::UserGraph& g, std::span<const double> v,
                           std::span<double> out) {
  const std::size_t n = g.num_items();
  const double w = 1.0 / (static_cast<double>(g.n_pos) * static_cast<double>(g.n_neg));
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    double degree = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (g.preferences[j] != g.preferences[k]) {
        degree += w;
        sum -= w * v[k];
      }
    }
    out[j] = sum + degree * v[j];
  }
}

void BM_lap_vec_product(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const sfcml::UserGraph g = graph_of(n, n / 10 + 1, 7);
  std::vector<double> v(n), out(n);
  sfcml::Rng rng(11);
  for (double& x : v) x = rng.normal(0.0, 1.0);
  for (auto _ : state) {
    sfcml::lap_vec_product(g, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_lap_vec_product)->RangeMultiplier(10)->Range(200, 20000)->Complexity();

void BM_dense_rowwise_product(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const sfcml::UserGraph g = graph_of(n, n / 10 + 1, 7);
  std::vector<double> v(n), out(n);
  sfcml::Rng rng(11);
  for (double& x : v) x = rng.normal(0.0, 1.0);
  for (auto _ : state) {
    dense_rowwise_product(g, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_dense_rowwise_product)->RangeMultiplier(10)->Range(200, 20000)->Complexity();

}  // namespace
