#include <benchmark/benchmark.h>

#include <vector>

#include "sfcml/dataset.hpp"
#include "sfcml/laplacian.hpp"
#include "sfcml/model.hpp"
#include "sfcml/rng.hpp"
#include "sfcml/trainer.hpp"

namespace {

// Synthetic implicit-feedback matrix: every user gets n_pos random positives.
sfcml::InteractionMatrix synthetic_matrix(std::size_t users, std::size_t items,
                                          std::size_t n_pos, std::uint64_t seed) {
  sfcml::InteractionMatrix m;
  m.num_users = users;
  m.num_items = items;
  m.positives.resize(users);
  sfcml::Rng rng(seed);
  std::vector<std::uint32_t> pool(items);
  for (std::size_t j = 0; j < items; ++j) pool[j] = static_cast<std::uint32_t>(j);
  for (std::size_t u = 0; u < users; ++u) {
    rng.partial_shuffle(pool, n_pos);
    m.positives[u].assign(pool.begin(), pool.begin() + n_pos);
    std::sort(m.positives[u].begin(), m.positives[u].end());
  }
  return m;
}

void BM_sfcml_epoch(benchmark::State& state) {
  const auto users = static_cast<std::size_t>(state.range(0));
  const auto items = static_cast<std::size_t>(state.range(1));
  const sfcml::InteractionMatrix train = synthetic_matrix(users, items, 20, 3);
  std::vector<sfcml::UserGraph> graphs;
  for (std::size_t u = 0; u < users; ++u) {
    graphs.push_back(sfcml::make_user_graph(train.positives[u], items));
  }
  sfcml::TrainConfig config;
  config.dim = 64;
  sfcml::EmbeddingModel model = sfcml::make_model(users, items, config.dim, 1.0, 5);
  sfcml::AdagradState adagrad = sfcml::make_adagrad_state(users, items, config.dim);
  std::size_t epoch = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sfcml::train_epoch_sfcml(model, train, graphs, config, adagrad, epoch++));
  }
}
BENCHMARK(BM_sfcml_epoch)->Args({200, 1000})->Args({500, 2000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
