#pragma once

#include <cstdint>
#include <span>

#include "sfcml/matrix.hpp"

namespace sfcml {

/// A user's implicit comparison graph over the item set: the complete
/// bipartite graph between positive and unobserved items with uniform edge
/// weight 1/(n+ * n-). Its Laplacian is never materialized outside the dense
/// test oracle; the training path only uses the matrix-free products below.
struct UserGraph {
  std::vector<std::uint8_t> preferences;  // y, one flag per item
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  std::size_t num_items() const { return preferences.size(); }
};

/// Builds the graph from a user's positive item list (indices into [0, N)).
UserGraph make_user_graph(std::span<const std::uint32_t> positives, std::size_t num_items);

/// Exact N x N Laplacian, diag(D*1) - D with D the rank-two adjacency.
/// Test oracle only; refuses N > 2000.
Matrix dense_laplacian(const UserGraph& g);

/// L*v in Theta(N) time and O(N) space via the rank-structured form
/// L = diag(y/n+ + (1-y)/n-) - [y(1-y)^T + (1-y)y^T]/(n+ n-).
void lap_vec_product(const UserGraph& g, std::span<const double> v, std::span<double> out);
std::vector<double> lap_vec_product(const UserGraph& g, std::span<const double> v);

/// L*Q for N x q Q, column-wise application of the vector product; Theta(qN).
/// L is symmetric, so this also provides P^T L as (L P)^T.
Matrix lap_mat_product(const UserGraph& g, const Matrix& q);

/// v^T L v (>= 0 up to rounding; L is positive semidefinite).
double quadratic_form(const UserGraph& g, std::span<const double> v);

}  // namespace sfcml
