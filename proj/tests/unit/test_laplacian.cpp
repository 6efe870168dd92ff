#include <doctest.h>

#include <vector>

#include "sfcml/errors.hpp"
#include "sfcml/laplacian.hpp"
#include "sfcml/rng.hpp"
#include "support/test_helpers.hpp"

using namespace sfcml;
using sfcml::testing::graph_from_flags;

namespace {

UserGraph random_graph(Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> y(n, 0);
  const std::size_t n_pos = 1 + rng.bounded(n - 1);
  for (std::size_t i = 0; i < n_pos; ++i) y[i] = 1;
  rng.shuffle(y);
  return graph_from_flags(y);
}

}  // namespace

TEST_CASE("dense Laplacian of a three-item graph") {
  const UserGraph g = graph_from_flags({1, 0, 0});
  const Matrix l = dense_laplacian(g);
  const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(l(j, k) == doctest::Approx(expected[j][k]).epsilon(1e-15));
    }
  }
}

TEST_CASE("dense Laplacian of a single edge") {
  const Matrix l = dense_laplacian(graph_from_flags({1, 0}));
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(1, 0) == -1.0);
  CHECK(l(1, 1) == 1.0);
}

TEST_CASE("degenerate graphs are rejected") {
  CHECK_THROWS_AS(dense_laplacian(graph_from_flags({1, 1, 1})), DegenerateGraphError);
  CHECK_THROWS_AS(dense_laplacian(graph_from_flags({0, 0})), DegenerateGraphError);
  const UserGraph g = graph_from_flags({1, 1});
  const std::vector<double> v{1.0, 2.0};
  CHECK_THROWS_AS(lap_vec_product(g, v), DegenerateGraphError);
  CHECK_THROWS_AS(quadratic_form(g, v), DegenerateGraphError);
}

TEST_CASE("dense guard") {
  std::vector<std::uint8_t> y(2001, 0);
  y[0] = 1;
  CHECK_THROWS_AS(dense_laplacian(graph_from_flags(y)), TooLargeForDenseError);
}

TEST_CASE("matrix-free product matches the hand-evaluated example") {
  const UserGraph g = graph_from_flags({1, 0, 0});
  const std::vector<double> v{-0.5, -0.5, 0.2};
  const std::vector<double> lv = lap_vec_product(g, v);
  CHECK(lv[0] == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(lv[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lv[2] == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("all-ones and zero vectors are in the kernel") {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const UserGraph g = random_graph(rng, 2 + rng.bounded(60));
    const std::vector<double> ones(g.num_items(), 1.0);
    const std::vector<double> zeros(g.num_items(), 0.0);
    for (const double x : lap_vec_product(g, ones)) CHECK(std::abs(x) <= 1e-12);
    for (const double x : lap_vec_product(g, zeros)) CHECK(x == 0.0);
  }
}

TEST_CASE("quadratic form hand example and kernel") {
  const UserGraph g = graph_from_flags({1, 0, 0});
  const std::vector<double> v{-0.5, -0.5, 0.2};
  CHECK(quadratic_form(g, v) == doctest::Approx(0.245).epsilon(1e-12));
  const std::vector<double> constant(3, 3.75);
  CHECK(std::abs(quadratic_form(g, constant)) <= 1e-12);
  const std::vector<double> zeros(3, 0.0);
  CHECK(quadratic_form(g, zeros) == 0.0);
}

TEST_CASE("matrix product reduces to the vector product") {
  const UserGraph g = graph_from_flags({1, 0, 0});
  Matrix q(3, 1);
  q(0, 0) = -0.5;
  q(1, 0) = -0.5;
  q(2, 0) = 0.2;
  const Matrix out = lap_mat_product(g, q);
  CHECK(out(0, 0) == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(out(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out(2, 0) == doctest::Approx(0.35).epsilon(1e-12));

  Matrix ones(3, 4, 1.0);
  const Matrix in_kernel = lap_mat_product(g, ones);
  for (const double x : in_kernel.flat()) CHECK(std::abs(x) <= 1e-12);
}

TEST_CASE("matrix product agrees with the dense oracle") {
  Rng rng(77);
  const std::size_t n = 50, q_cols = 4;
  const UserGraph g = random_graph(rng, n);
  Matrix q(n, q_cols);
  for (double& x : q.flat()) x = rng.normal(0.0, 1.0);
  const Matrix fast = lap_mat_product(g, q);
  const Matrix dense = dense_laplacian(g);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < q_cols; ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += dense(j, k) * q(k, c);
      CHECK(std::abs(fast(j, c) - sum) <= 1e-12);
    }
  }
}

TEST_CASE("property: matrix-free vs dense, symmetry, PSD, degree row sums") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.bounded(199);
    const UserGraph g = random_graph(rng, n);
    std::vector<double> v(n), u(n);
    for (double& x : v) x = rng.normal(0.0, 1.0);
    for (double& x : u) x = rng.normal(0.0, 1.0);

    const Matrix dense = dense_laplacian(g);
    const std::vector<double> fast = lap_vec_product(g, v);
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += dense(j, k) * v[k];
      CHECK(std::abs(sum - fast[j]) <= 1e-12);
    }

    const std::vector<double> lu = lap_vec_product(g, u);
    CHECK(std::abs(dot(u, fast) - dot(lu, v)) <= 1e-12);
    CHECK(quadratic_form(g, v) >= -1e-12);

    // Degree of vertex j (diagonal of L, since D has zero diagonal) matches
    // the closed form y_j/n+ + (1-y_j)/n-.
    const double inv_pos = 1.0 / static_cast<double>(g.n_pos);
    const double inv_neg = 1.0 / static_cast<double>(g.n_neg);
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = g.preferences[j] ? inv_pos : inv_neg;
      CHECK(std::abs(dense(j, j) - expected) <= 1e-12);
    }
  }
}
