#include "sfcml/losses.hpp"

#include <algorithm>
#include <string>

#include "sfcml/errors.hpp"

namespace sfcml {

namespace {

constexpr std::size_t kNaiveGuard = 2000;

void check_shapes(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g) {
  if (user >= model.num_users()) throw IndexOutOfRangeError("user index " + std::to_string(user));
  if (g.num_items() != model.num_items()) {
    throw IndexOutOfRangeError("graph item count does not match model");
  }
}

void subtract_margin(std::span<double> scores, const UserGraph& g, double margin) {
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (g.preferences[j]) scores[j] -= margin;
  }
}

}  // namespace

double sfcml_user_loss(std::span<const double> scores, const UserGraph& g, double margin) {
  std::vector<double> residual(scores.begin(), scores.end());
  subtract_margin(residual, g, margin);
  return quadratic_form(g, residual);
}

SfcmlTerms sfcml_user_terms(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                            double margin, std::span<double> score_buf) {
  check_shapes(model, user, g);
  score_user(model, user, score_buf);
  subtract_margin(score_buf, g, margin);
  SfcmlTerms terms;
  terms.lap_residual.resize(score_buf.size());
  lap_vec_product(g, score_buf, terms.lap_residual);
  terms.loss = dot(score_buf, terms.lap_residual);
  return terms;
}

UserGradients sfcml_user_grads(const EmbeddingModel& model, std::uint32_t user,
                               const UserGraph& g, double margin) {
  check_shapes(model, user, g);
  std::vector<double> scores(model.num_items());
  const SfcmlTerms terms = sfcml_user_terms(model, user, g, margin, scores);

  UserGradients grads;
  grads.user.assign(model.dim(), 0.0);
  grads.items = Matrix(model.num_items(), model.dim());
  const auto e_u = model.users.row(user);
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    const double lr = terms.lap_residual[j];
    if (lr == 0.0) continue;
    axpy(4.0 * lr, model.items.row(j), grads.user);
    axpy(4.0 * lr, e_u, grads.items.row(j));
  }
  return grads;
}

double naive_pairwise_loss(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                           LossKind kind, double margin) {
  check_shapes(model, user, g);
  const std::size_t n = g.num_items();
  if (n > kNaiveGuard) throw TooLargeForNaiveError("naive loss guard: N=" + std::to_string(n));
  if (g.n_pos == 0 || g.n_neg == 0) throw DegenerateGraphError("degenerate user graph");

  std::vector<double> dist(n);
  for (std::uint32_t j = 0; j < n; ++j) dist[j] = distance(model, user, j);

  double total = 0.0;
  for (std::uint32_t j = 0; j < n; ++j) {
    if (!g.preferences[j]) continue;
    for (std::uint32_t k = 0; k < n; ++k) {
      if (g.preferences[k]) continue;
      const double z = margin + dist[j] - dist[k];
      if (kind == LossKind::hinge) {
        total += std::max(0.0, z);
      } else {
        total += z * z;
      }
    }
  }
  return total / (static_cast<double>(g.n_pos) * static_cast<double>(g.n_neg));
}

UserGradients naive_pairwise_grads(const EmbeddingModel& model, std::uint32_t user,
                                   const UserGraph& g, LossKind kind, double margin) {
  check_shapes(model, user, g);
  const std::size_t n = g.num_items();
  if (n > kNaiveGuard) throw TooLargeForNaiveError("naive grads guard: N=" + std::to_string(n));
  if (g.n_pos == 0 || g.n_neg == 0) throw DegenerateGraphError("degenerate user graph");

  UserGradients grads;
  grads.user.assign(model.dim(), 0.0);
  grads.items = Matrix(n, model.dim());
  const auto e_u = model.users.row(user);
  const double inv = 1.0 / (static_cast<double>(g.n_pos) * static_cast<double>(g.n_neg));

  if (kind == LossKind::hinge) {
    std::vector<double> dist(n);
    for (std::uint32_t j = 0; j < n; ++j) dist[j] = distance(model, user, j);
    for (std::uint32_t j = 0; j < n; ++j) {
      if (!g.preferences[j]) continue;
      const auto e_j = model.items.row(j);
      for (std::uint32_t k = 0; k < n; ++k) {
        if (g.preferences[k]) continue;
        const double z = margin + dist[j] - dist[k];
        if (z <= 0.0) continue;  // inactive, including pairs exactly on the margin
        const auto e_k = model.items.row(k);
        auto g_j = grads.items.row(j);
        auto g_k = grads.items.row(k);
        for (std::size_t c = 0; c < e_u.size(); ++c) {
          grads.user[c] += 2.0 * inv * (e_k[c] - e_j[c]);
          g_j[c] += 2.0 * inv * (e_j[c] - e_u[c]);
          g_k[c] += 2.0 * inv * (e_u[c] - e_k[c]);
        }
      }
    }
  } else {
    std::vector<double> scores(n);
    score_user(model, user, scores);
    for (std::uint32_t j = 0; j < n; ++j) {
      if (!g.preferences[j]) continue;
      const auto e_j = model.items.row(j);
      for (std::uint32_t k = 0; k < n; ++k) {
        if (g.preferences[k]) continue;
        const double z = margin - (scores[j] - scores[k]);
        const auto e_k = model.items.row(k);
        auto g_j = grads.items.row(j);
        auto g_k = grads.items.row(k);
        for (std::size_t c = 0; c < e_u.size(); ++c) {
          grads.user[c] += 4.0 * inv * z * (e_k[c] - e_j[c]);
          g_j[c] -= 4.0 * inv * z * e_u[c];
          g_k[c] += 4.0 * inv * z * e_u[c];
        }
      }
    }
  }
  return grads;
}

double sampled_hinge_loss(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
                          std::span<const std::pair<std::uint32_t, std::uint32_t>> triplets,
                          double margin) {
  check_shapes(model, user, g);
  if (triplets.empty()) throw InvalidTripletError("empty triplet list");
  double total = 0.0;
  for (const auto& [pos, neg] : triplets) {
    if (pos >= g.num_items() || neg >= g.num_items()) {
      throw IndexOutOfRangeError("triplet item out of range");
    }
    if (!g.preferences[pos]) {
      throw InvalidTripletError("triplet positive " + std::to_string(pos) + " is not a positive");
    }
    if (g.preferences[neg]) {
      throw InvalidTripletError("triplet negative " + std::to_string(neg) + " is a positive");
    }
    total += std::max(0.0, margin + distance(model, user, pos) - distance(model, user, neg));
  }
  return total / static_cast<double>(triplets.size());
}

}  // namespace sfcml
