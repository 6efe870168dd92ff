#include "sfcml/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "sfcml/errors.hpp"
#include "sfcml/losses.hpp"
#include "sfcml/rng.hpp"

namespace sfcml {

namespace {

std::vector<std::uint32_t> shuffled_users(std::size_t num_users, std::uint64_t seed,
                                          std::size_t epoch_index) {
  std::vector<std::uint32_t> order(num_users);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, seed_tag::epoch, epoch_index));
  rng.shuffle(order);
  return order;
}

/// Computes user gradient and adds this user's item-gradient contribution,
/// both scaled from L*(f - margin*y).
void accumulate_sfcml_grads(const EmbeddingModel& model, std::uint32_t user,
                            std::span<const double> lap_residual, std::span<double> grad_user,
                            Matrix& item_grads) {
  const auto e_u = model.users.row(user);
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    const double lr = lap_residual[j];
    if (lr == 0.0) continue;
    axpy(4.0 * lr, model.items.row(j), grad_user);
    axpy(4.0 * lr, e_u, item_grads.row(j));
  }
}

void check_dims(const EmbeddingModel& model, const InteractionMatrix& train,
                std::span<const UserGraph> graphs) {
  if (model.num_users() != train.num_users || model.num_items() != train.num_items ||
      graphs.size() != train.num_users) {
    throw IndexOutOfRangeError("model/split/graph dimensions disagree");
  }
}

}  // namespace

AdagradState make_adagrad_state(std::size_t num_users, std::size_t num_items, std::size_t dim) {
  AdagradState state;
  state.accum_users = Matrix(num_users, dim);
  state.accum_items = Matrix(num_items, dim);
  return state;
}

void adagrad_step(std::span<double> weights, std::span<const double> grads,
                  std::span<double> accum, double learning_rate, double epsilon) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grads[i];
    accum[i] += g * g;
    weights[i] -= learning_rate * g / (std::sqrt(accum[i]) + epsilon);
  }
}

double train_epoch_sfcml(EmbeddingModel& model, const InteractionMatrix& train,
                         std::span<const UserGraph> graphs, const TrainConfig& config,
                         AdagradState& state, std::size_t epoch_index) {
  check_dims(model, train, graphs);
  project_to_sphere(model, ProjectionTarget::both);

  const std::size_t num_users = train.num_users;
  const std::size_t batch_size = config.sequential_updates ? 1 : std::max<std::size_t>(1, config.batch_size);
  std::vector<std::uint32_t> order = shuffled_users(num_users, config.seed, epoch_index);

  std::vector<double> scores(model.num_items());
  std::vector<double> grad_user(model.dim());
  Matrix item_grads(model.num_items(), model.dim());
  double total_loss = 0.0;

  for (std::size_t start = 0; start < num_users; start += batch_size) {
    const std::size_t end = std::min(num_users, start + batch_size);
    std::vector<std::uint32_t> batch(order.begin() + start, order.begin() + end);
    std::sort(batch.begin(), batch.end());

    item_grads.fill(0.0);
    for (const std::uint32_t user : batch) {
      const SfcmlTerms terms = sfcml_user_terms(model, user, graphs[user], config.margin, scores);
      total_loss += terms.loss;
      std::fill(grad_user.begin(), grad_user.end(), 0.0);
      accumulate_sfcml_grads(model, user, terms.lap_residual, grad_user, item_grads);
      adagrad_step(model.users.row(user), grad_user, state.accum_users.row(user),
                   config.learning_rate, state.epsilon);
    }
    adagrad_step(model.items.flat(), item_grads.flat(), state.accum_items.flat(),
                 config.learning_rate, state.epsilon);
    project_to_sphere(model, ProjectionTarget::items);
  }
  project_to_sphere(model, ProjectionTarget::users);
  return total_loss / static_cast<double>(num_users);
}

double train_epoch_sampled(EmbeddingModel& model, const InteractionMatrix& train,
                           std::span<const UserGraph> graphs,
                           std::span<const std::uint32_t> popularity, const TrainConfig& config,
                           AdagradState& state, std::size_t epoch_index) {
  check_dims(model, train, graphs);
  project_to_sphere(model, ProjectionTarget::both);

  const std::size_t num_users = train.num_users;
  const std::size_t batch_size = config.sequential_updates ? 1 : std::max<std::size_t>(1, config.batch_size);
  std::vector<std::uint32_t> order = shuffled_users(num_users, config.seed, epoch_index);

  std::vector<double> grad_user(model.dim());
  Matrix item_grads(model.num_items(), model.dim());
  double total_loss = 0.0;

  for (std::size_t start = 0; start < num_users; start += batch_size) {
    const std::size_t end = std::min(num_users, start + batch_size);
    std::vector<std::uint32_t> batch(order.begin() + start, order.begin() + end);
    std::sort(batch.begin(), batch.end());

    item_grads.fill(0.0);
    for (const std::uint32_t user : batch) {
      const UserGraph& g = graphs[user];
      const auto& positives = train.positives[user];
      Rng rng(mix_seed(config.seed, seed_tag::sampler, epoch_index, user));
      const auto e_u = model.users.row(user);
      const double inv_norm = 1.0 / (static_cast<double>(g.n_pos) *
                                     static_cast<double>(config.sampler.negatives_per_positive));

      std::fill(grad_user.begin(), grad_user.end(), 0.0);
      double loss_sum = 0.0;
      for (const std::uint32_t pos : positives) {
        const double d_pos = distance(model, user, pos);
        const auto negatives =
            sample_negatives(config.sampler, model, user, pos, g, popularity, rng);
        const auto e_p = model.items.row(pos);
        for (const std::uint32_t neg : negatives) {
          const double z = config.margin + d_pos - distance(model, user, neg);
          if (z <= 0.0) continue;
          loss_sum += z;
          const auto e_n = model.items.row(neg);
          auto gp = item_grads.row(pos);
          auto gn = item_grads.row(neg);
          for (std::size_t c = 0; c < e_u.size(); ++c) {
            grad_user[c] += 2.0 * inv_norm * (e_n[c] - e_p[c]);
            gp[c] += 2.0 * inv_norm * (e_p[c] - e_u[c]);
            gn[c] += 2.0 * inv_norm * (e_u[c] - e_n[c]);
          }
        }
      }
      total_loss += loss_sum * inv_norm;
      adagrad_step(model.users.row(user), grad_user, state.accum_users.row(user),
                   config.learning_rate, state.epsilon);
    }
    adagrad_step(model.items.flat(), item_grads.flat(), state.accum_items.flat(),
                 config.learning_rate, state.epsilon);
    project_to_sphere(model, ProjectionTarget::items);
  }
  project_to_sphere(model, ProjectionTarget::users);
  return total_loss / static_cast<double>(num_users);
}

bool should_early_stop(std::span<const double> validation_history, std::size_t patience,
                       double epsilon) {
  if (validation_history.empty()) return false;
  std::size_t last_improvement = 0;
  double best = validation_history[0];
  for (std::size_t t = 1; t < validation_history.size(); ++t) {
    if (validation_history[t] > best + epsilon) {
      last_improvement = t;
    }
    best = std::max(best, validation_history[t]);
  }
  return validation_history.size() - 1 - last_improvement >= patience;
}

MetricsReport evaluate(const EmbeddingModel& model, const DatasetSplit& split, SplitPart part,
                       std::span<const std::size_t> ks, MaskMode mask_mode) {
  const std::size_t num_users = split.train.num_users;
  const std::size_t num_items = split.train.num_items;
  if (model.num_users() != num_users || model.num_items() != num_items) {
    throw IndexOutOfRangeError("model does not match split dimensions");
  }

  std::vector<UserMetrics> per_user;
  std::vector<std::uint8_t> masked(num_items);
  std::vector<std::uint8_t> relevant_flag(num_items);
  for (std::uint32_t user = 0; user < num_users; ++user) {
    const auto& relevant =
        part == SplitPart::validation ? split.validation[user] : split.test[user];
    if (relevant.empty()) continue;

    std::fill(masked.begin(), masked.end(), 0);
    if (mask_mode == MaskMode::masked) {
      for (const auto j : split.train.positives[user]) masked[j] = 1;
      if (part == SplitPart::test) {
        for (const auto j : split.validation[user]) masked[j] = 1;
      }
    }
    std::fill(relevant_flag.begin(), relevant_flag.end(), 0);
    for (const auto j : relevant) relevant_flag[j] = 1;

    std::vector<std::uint32_t> candidates;
    candidates.reserve(num_items);
    std::vector<double> scores;  // -d, aligned with candidates
    scores.reserve(num_items);
    std::vector<std::uint8_t> flags;
    flags.reserve(num_items);
    for (std::uint32_t j = 0; j < num_items; ++j) {
      if (masked[j]) continue;
      candidates.push_back(j);
      scores.push_back(-distance(model, user, j));
      flags.push_back(relevant_flag[j]);
    }

    std::vector<std::uint32_t> position(candidates.size());
    std::iota(position.begin(), position.end(), 0);
    std::sort(position.begin(), position.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return candidates[a] < candidates[b];
    });
    std::vector<std::uint32_t> full_ranking(candidates.size());
    for (std::size_t p = 0; p < position.size(); ++p) full_ranking[p] = candidates[position[p]];

    UserMetrics metrics;
    for (const std::size_t k : ks) {
      if (k > full_ranking.size()) {
        throw InsufficientItemsError("k=" + std::to_string(k) + " exceeds candidate count");
      }
      const std::span<const std::uint32_t> topk(full_ranking.data(), k);
      metrics.precision_at[k] = precision_at_k(topk, relevant, k);
      metrics.recall_at[k] = recall_at_k(topk, relevant);
      metrics.ndcg_at[k] = ndcg_at_k(topk, relevant, k);
    }
    metrics.average_precision = average_precision(full_ranking, relevant);
    metrics.reciprocal_rank_sum = reciprocal_rank_sum(full_ranking, relevant);
    metrics.auc = user_auc(scores, flags);
    per_user.push_back(std::move(metrics));
  }
  return aggregate_report(per_user);
}

TrainResult train(const DatasetSplit& split, const TrainConfig& config) {
  const InteractionMatrix& train_matrix = split.train;
  std::vector<UserGraph> graphs;
  graphs.reserve(train_matrix.num_users);
  for (std::size_t user = 0; user < train_matrix.num_users; ++user) {
    graphs.push_back(make_user_graph(train_matrix.positives[user], train_matrix.num_items));
    if (graphs.back().n_pos == 0 || graphs.back().n_neg == 0) {
      throw DegenerateGraphError("train split leaves user " + std::to_string(user) +
                                 " with a degenerate graph");
    }
  }
  const std::vector<std::uint32_t> popularity = item_popularity(train_matrix);

  TrainResult result;
  result.final_model = make_model(train_matrix.num_users, train_matrix.num_items, config.dim,
                                  config.radius, config.seed);
  AdagradState state =
      make_adagrad_state(train_matrix.num_users, train_matrix.num_items, config.dim);

  std::vector<double> history;
  result.best_val_auc = -1.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double mean_loss = 0.0;
    if (config.method == TrainMethod::sfcml) {
      mean_loss = train_epoch_sfcml(result.final_model, train_matrix, graphs, config, state, epoch);
    } else {
      mean_loss = train_epoch_sampled(result.final_model, train_matrix, graphs, popularity, config,
                                      state, epoch);
    }
    const MetricsReport val =
        evaluate(result.final_model, split, SplitPart::validation, {}, MaskMode::masked);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    history.push_back(val.auc_score);
    result.log.push_back({epoch + 1, mean_loss, val.auc_score, seconds});
    if (val.auc_score > result.best_val_auc) {
      result.best_val_auc = val.auc_score;
      result.best_epoch = epoch + 1;
      result.best_model = result.final_model;
    }
    if (should_early_stop(history, config.patience, config.improvement_epsilon)) break;
  }
  if (result.best_epoch == 0) throw NoEvaluableUsersError("training produced no epochs");
  return result;
}

}  // namespace sfcml
