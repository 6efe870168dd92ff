#include "sfcml/laplacian.hpp"

#include <string>

#include "sfcml/errors.hpp"

namespace sfcml {

namespace {

constexpr std::size_t kDenseGuard = 2000;

void require_valid(const UserGraph& g) {
  if (g.n_pos == 0 || g.n_neg == 0) {
    throw DegenerateGraphError("user graph needs both positive and unobserved items (n+=" +
                               std::to_string(g.n_pos) + ", n-=" + std::to_string(g.n_neg) + ")");
  }
}

}  // namespace

UserGraph make_user_graph(std::span<const std::uint32_t> positives, std::size_t num_items) {
  UserGraph g;
  g.preferences.assign(num_items, 0);
  for (const std::uint32_t j : positives) {
    if (j >= num_items) throw IndexOutOfRangeError("positive item " + std::to_string(j));
    g.preferences[j] = 1;
  }
  for (const std::uint8_t y : g.preferences) g.n_pos += y;
  g.n_neg = num_items - g.n_pos;
  return g;
}

Matrix dense_laplacian(const UserGraph& g) {
  require_valid(g);
  const std::size_t n = g.num_items();
  if (n > kDenseGuard) {
    throw TooLargeForDenseError("dense Laplacian guard: N=" + std::to_string(n));
  }
  const double weight = 1.0 / (static_cast<double>(g.n_pos) * static_cast<double>(g.n_neg));

  // Adjacency D_jk = weight iff y_j != y_k, then L = diag(D*1) - D. The
  // degree is taken from the actual row sums so the closed-form diagonal
  // has an independent check against this oracle.
  Matrix adjacency(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (g.preferences[j] != g.preferences[k]) adjacency(j, k) = weight;
    }
  }
  Matrix laplacian(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double degree = 0.0;
    for (std::size_t k = 0; k < n; ++k) degree += adjacency(j, k);
    for (std::size_t k = 0; k < n; ++k) laplacian(j, k) = -adjacency(j, k);
    laplacian(j, j) += degree;
  }
  return laplacian;
}

void lap_vec_product(const UserGraph& g, std::span<const double> v, std::span<double> out) {
  require_valid(g);
  const std::size_t n = g.num_items();
  if (v.size() != n || out.size() != n) {
    throw IndexOutOfRangeError("vector length does not match item count");
  }
  const double inv_pos = 1.0 / static_cast<double>(g.n_pos);
  const double inv_neg = 1.0 / static_cast<double>(g.n_neg);
  const double inv_cross = inv_pos * inv_neg;

  // Both inner products in one pass.
  double sum_pos = 0.0;  // <y, v>
  double sum_neg = 0.0;  // <1-y, v>
  for (std::size_t j = 0; j < n; ++j) {
    if (g.preferences[j]) {
      sum_pos += v[j];
    } else {
      sum_neg += v[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (g.preferences[j]) {
      out[j] = v[j] * inv_pos - sum_neg * inv_cross;
    } else {
      out[j] = v[j] * inv_neg - sum_pos * inv_cross;
    }
  }
}

std::vector<double> lap_vec_product(const UserGraph& g, std::span<const double> v) {
  std::vector<double> out(v.size());
  lap_vec_product(g, v, out);
  return out;
}

Matrix lap_mat_product(const UserGraph& g, const Matrix& q) {
  require_valid(g);
  const std::size_t n = g.num_items();
  if (q.rows() != n) throw IndexOutOfRangeError("matrix rows do not match item count");
  const std::size_t cols = q.cols();
  const double inv_pos = 1.0 / static_cast<double>(g.n_pos);
  const double inv_neg = 1.0 / static_cast<double>(g.n_neg);
  const double inv_cross = inv_pos * inv_neg;

  std::vector<double> sum_pos(cols, 0.0);
  std::vector<double> sum_neg(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    auto* sums = g.preferences[j] ? sum_pos.data() : sum_neg.data();
    const auto row = q.row(j);
    for (std::size_t c = 0; c < cols; ++c) sums[c] += row[c];
  }
  Matrix out(n, cols);
  for (std::size_t j = 0; j < n; ++j) {
    const auto src = q.row(j);
    auto dst = out.row(j);
    if (g.preferences[j]) {
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c] * inv_pos - sum_neg[c] * inv_cross;
    } else {
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c] * inv_neg - sum_pos[c] * inv_cross;
    }
  }
  return out;
}

double quadratic_form(const UserGraph& g, std::span<const double> v) {
  const std::vector<double> lv = lap_vec_product(g, v);
  return dot(v, lv);
}

}  // namespace sfcml
