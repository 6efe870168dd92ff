#include "sfcml/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfcml/rng.hpp"

namespace sfcml {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

UserGraph random_graph(Rng& rng, std::size_t num_items) {
  const std::size_t n_pos = 1 + static_cast<std::size_t>(rng.bounded(num_items - 1));
  std::vector<std::uint32_t> items(num_items);
  for (std::size_t j = 0; j < num_items; ++j) items[j] = static_cast<std::uint32_t>(j);
  rng.partial_shuffle(items, n_pos);
  items.resize(n_pos);
  std::sort(items.begin(), items.end());
  return make_user_graph(items, num_items);
}

double loss_of(const EmbeddingModel& model, std::uint32_t user, const UserGraph& g,
               double margin) {
  const std::vector<double> scores = score_vector(model, user);
  return sfcml_user_loss(scores, g, margin);
}

}  // namespace

SyntheticInstance make_synthetic_instance(std::uint64_t seed, std::size_t min_items,
                                          std::size_t max_items, std::size_t min_dim,
                                          std::size_t max_dim) {
  Rng rng(mix_seed(seed, seed_tag::synthetic));
  const std::size_t n = min_items + static_cast<std::size_t>(rng.bounded(max_items - min_items + 1));
  const std::size_t d = min_dim + static_cast<std::size_t>(rng.bounded(max_dim - min_dim + 1));
  SyntheticInstance instance;
  instance.model.radius = 1.0;
  instance.model.users = Matrix(1, d);
  instance.model.items = Matrix(n, d);
  for (double& x : instance.model.users.flat()) x = rng.normal(0.0, 1.0);
  for (double& x : instance.model.items.flat()) x = rng.normal(0.0, 1.0);
  project_to_sphere(instance.model, ProjectionTarget::both);
  instance.graph = random_graph(rng, n);
  instance.user = 0;
  return instance;
}

UserGradients finite_difference_grads(EmbeddingModel model, std::uint32_t user,
                                      const UserGraph& g, double margin, double step) {
  UserGradients grads;
  grads.user.assign(model.dim(), 0.0);
  grads.items = Matrix(model.num_items(), model.dim());
  auto e_u = model.users.row(user);
  for (std::size_t c = 0; c < model.dim(); ++c) {
    const double saved = e_u[c];
    e_u[c] = saved + step;
    const double up = loss_of(model, user, g, margin);
    e_u[c] = saved - step;
    const double down = loss_of(model, user, g, margin);
    e_u[c] = saved;
    grads.user[c] = (up - down) / (2.0 * step);
  }
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    auto row = model.items.row(j);
    for (std::size_t c = 0; c < model.dim(); ++c) {
      const double saved = row[c];
      row[c] = saved + step;
      const double up = loss_of(model, user, g, margin);
      row[c] = saved - step;
      const double down = loss_of(model, user, g, margin);
      row[c] = saved;
      grads.items(j, c) = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

UserGradients finite_difference_naive_grads(EmbeddingModel model, std::uint32_t user,
                                            const UserGraph& g, LossKind kind, double margin,
                                            double step) {
  UserGradients grads;
  grads.user.assign(model.dim(), 0.0);
  grads.items = Matrix(model.num_items(), model.dim());
  auto e_u = model.users.row(user);
  for (std::size_t c = 0; c < model.dim(); ++c) {
    const double saved = e_u[c];
    e_u[c] = saved + step;
    const double up = naive_pairwise_loss(model, user, g, kind, margin);
    e_u[c] = saved - step;
    const double down = naive_pairwise_loss(model, user, g, kind, margin);
    e_u[c] = saved;
    grads.user[c] = (up - down) / (2.0 * step);
  }
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    auto row = model.items.row(j);
    for (std::size_t c = 0; c < model.dim(); ++c) {
      const double saved = row[c];
      row[c] = saved + step;
      const double up = naive_pairwise_loss(model, user, g, kind, margin);
      row[c] = saved - step;
      const double down = naive_pairwise_loss(model, user, g, kind, margin);
      row[c] = saved;
      grads.items(j, c) = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

double gradient_relative_error(const UserGradients& a, const UserGradients& b) {
  double scale = std::max(1.0, max_abs(b.user));
  scale = std::max(scale, max_abs(b.items.flat()));
  double diff = 0.0;
  for (std::size_t c = 0; c < a.user.size(); ++c) diff = std::max(diff, std::abs(a.user[c] - b.user[c]));
  const auto af = a.items.flat();
  const auto bf = b.items.flat();
  for (std::size_t i = 0; i < af.size(); ++i) diff = std::max(diff, std::abs(af[i] - bf[i]));
  return diff / scale;
}

bool VerifyReport::passed() const {
  return lap_dense_max_abs <= kLaplacianTolerance && lap_rowsum_max_abs <= kLaplacianTolerance &&
         lap_symmetry_max_abs <= kLaplacianTolerance && lap_psd_min >= -kLaplacianTolerance &&
         loss_equivalence_max_rel <= kLossEquivalenceTolerance &&
         grad_vs_naive_max_rel <= kGradNaiveTolerance && grad_vs_fd_max_rel <= kGradFdTolerance;
}

VerifyReport run_laplacian_suite(const VerifyOptions& options) {
  VerifyReport report;
  report.lap_psd_min = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Rng rng(mix_seed(options.seed, seed_tag::synthetic, 1, trial));
    const std::size_t n = 2 + static_cast<std::size_t>(rng.bounded(options.max_items - 1));
    const UserGraph g = random_graph(rng, n);

    std::vector<double> v(n), u(n), ones(n, 1.0);
    for (double& x : v) x = rng.normal(0.0, 1.0);
    for (double& x : u) x = rng.normal(0.0, 1.0);

    const Matrix dense = dense_laplacian(g);
    const std::vector<double> fast = lap_vec_product(g, v);
    for (std::size_t j = 0; j < n; ++j) {
      double row = 0.0;
      for (std::size_t k = 0; k < n; ++k) row += dense(j, k) * v[k];
      report.lap_dense_max_abs = std::max(report.lap_dense_max_abs, std::abs(row - fast[j]));
    }
    report.lap_rowsum_max_abs =
        std::max(report.lap_rowsum_max_abs, max_abs(lap_vec_product(g, ones)));
    const std::vector<double> lu = lap_vec_product(g, u);
    report.lap_symmetry_max_abs =
        std::max(report.lap_symmetry_max_abs, std::abs(dot(u, fast) - dot(lu, v)));
    report.lap_psd_min = std::min(report.lap_psd_min, quadratic_form(g, v));
  }
  return report;
}

VerifyReport run_loss_equivalence_suite(const VerifyOptions& options) {
  VerifyReport report;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const SyntheticInstance instance = make_synthetic_instance(
        mix_seed(options.seed, seed_tag::synthetic, 2, trial), 3, options.max_items, 2, 32);
    Rng rng(mix_seed(options.seed, seed_tag::synthetic, 3, trial));
    const double margin = 0.5 + rng.next_double() * 1.5;
    const double fast = loss_of(instance.model, instance.user, instance.graph, margin);
    const double naive =
        naive_pairwise_loss(instance.model, instance.user, instance.graph, LossKind::square, margin);
    const double rel = std::abs(fast - naive) / std::max(1.0, naive);
    report.loss_equivalence_max_rel = std::max(report.loss_equivalence_max_rel, rel);
  }
  return report;
}

VerifyReport run_gradient_suite(const VerifyOptions& options) {
  VerifyReport report;
  const std::size_t max_items = std::min<std::size_t>(options.max_items, 40);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const SyntheticInstance instance = make_synthetic_instance(
        mix_seed(options.seed, seed_tag::synthetic, 4, trial), 3, max_items, 2, 8);
    Rng rng(mix_seed(options.seed, seed_tag::synthetic, 5, trial));
    const double margin = 0.5 + rng.next_double() * 1.5;

    const UserGradients fast =
        sfcml_user_grads(instance.model, instance.user, instance.graph, margin);
    const UserGradients naive = naive_pairwise_grads(instance.model, instance.user, instance.graph,
                                                     LossKind::square, margin);
    report.grad_vs_naive_max_rel =
        std::max(report.grad_vs_naive_max_rel, gradient_relative_error(fast, naive));
    const UserGradients fd =
        finite_difference_grads(instance.model, instance.user, instance.graph, margin, kFdStep);
    report.grad_vs_fd_max_rel =
        std::max(report.grad_vs_fd_max_rel, gradient_relative_error(fast, fd));
  }
  return report;
}

VerifyReport run_verification(const VerifyOptions& options) {
  const VerifyReport lap = run_laplacian_suite(options);
  const VerifyReport loss = run_loss_equivalence_suite(options);
  const VerifyReport grad = run_gradient_suite(options);
  VerifyReport merged = lap;
  merged.loss_equivalence_max_rel = loss.loss_equivalence_max_rel;
  merged.grad_vs_naive_max_rel = grad.grad_vs_naive_max_rel;
  merged.grad_vs_fd_max_rel = grad.grad_vs_fd_max_rel;
  return merged;
}

}  // namespace sfcml
