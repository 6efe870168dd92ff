#include "sfcml/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sfcml/errors.hpp"
#include "sfcml/rng.hpp"

namespace sfcml {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kInitStddev = 0.01;

void check_user(const EmbeddingModel& model, std::uint32_t user) {
  if (user >= model.num_users()) {
    throw IndexOutOfRangeError("user index " + std::to_string(user));
  }
}

void check_item(const EmbeddingModel& model, std::uint32_t item) {
  if (item >= model.num_items()) {
    throw IndexOutOfRangeError("item index " + std::to_string(item));
  }
}

void project_rows(Matrix& rows, double radius, std::uint64_t resample_stream) {
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto row = rows.row(i);
    double norm = std::sqrt(squared_norm(row));
    if (norm < kDegenerateNorm) {
      Rng rng(mix_seed(resample_stream, seed_tag::resample, i));
      do {
        for (double& x : row) x = rng.normal(0.0, kInitStddev);
        norm = std::sqrt(squared_norm(row));
      } while (norm < kDegenerateNorm);
    }
    const double scale = std::sqrt(radius) / norm;
    for (double& x : row) x *= scale;
  }
}

void format_value(std::string& out, double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

EmbeddingModel make_model(std::size_t num_users, std::size_t num_items, std::size_t dim,
                          double radius, std::uint64_t seed) {
  EmbeddingModel model;
  model.users = Matrix(num_users, dim);
  model.items = Matrix(num_items, dim);
  model.radius = radius;
  Rng rng(mix_seed(seed, seed_tag::init));
  for (double& x : model.users.flat()) x = rng.normal(0.0, kInitStddev);
  for (double& x : model.items.flat()) x = rng.normal(0.0, kInitStddev);
  project_to_sphere(model, ProjectionTarget::both);
  return model;
}

void project_to_sphere(EmbeddingModel& model, ProjectionTarget which) {
  if (which == ProjectionTarget::users || which == ProjectionTarget::both) {
    project_rows(model.users, model.radius, /*resample_stream=*/0x75736572);
  }
  if (which == ProjectionTarget::items || which == ProjectionTarget::both) {
    project_rows(model.items, model.radius, /*resample_stream=*/0x6974656d);
  }
}

void score_user(const EmbeddingModel& model, std::uint32_t user, std::span<double> out) {
  check_user(model, user);
  const auto e_u = model.users.row(user);
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    out[j] = 2.0 * dot(e_u, model.items.row(j));
  }
}

std::vector<double> score_vector(const EmbeddingModel& model, std::uint32_t user) {
  std::vector<double> scores(model.num_items());
  score_user(model, user, scores);
  return scores;
}

double distance(const EmbeddingModel& model, std::uint32_t user, std::uint32_t item) {
  check_user(model, user);
  check_item(model, item);
  const auto e_u = model.users.row(user);
  const auto e_v = model.items.row(item);
  double sum = 0.0;
  for (std::size_t c = 0; c < e_u.size(); ++c) {
    const double diff = e_u[c] - e_v[c];
    sum += diff * diff;
  }
  return sum;
}

std::vector<std::uint32_t> rank_top_k(const EmbeddingModel& model, std::uint32_t user,
                                      std::size_t k, std::span<const std::uint32_t> mask) {
  check_user(model, user);
  const std::size_t n = model.num_items();
  std::vector<std::uint8_t> masked(n, 0);
  for (const std::uint32_t j : mask) {
    check_item(model, j);
    masked[j] = 1;
  }
  if (n - mask.size() < k) {
    throw InsufficientItemsError("requested top-" + std::to_string(k) + " of " +
                                 std::to_string(n - mask.size()) + " unmasked items");
  }
  std::vector<std::uint32_t> candidates;
  candidates.reserve(n - mask.size());
  std::vector<double> neg_dist(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    if (!masked[j]) {
      neg_dist[j] = -distance(model, user, j);
      candidates.push_back(j);
    }
  }
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
                      if (neg_dist[a] != neg_dist[b]) return neg_dist[a] > neg_dist[b];
                      return a < b;
                    });
  candidates.resize(k);
  return candidates;
}

void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::string out;
  out.reserve((model.num_users() + model.num_items()) * model.dim() * 20 + 64);
  out += "sfcml-embeddings v1 ";
  out += std::to_string(model.num_users());
  out += ' ';
  out += std::to_string(model.num_items());
  out += ' ';
  out += std::to_string(model.dim());
  out += ' ';
  format_value(out, model.radius);
  out += '\n';
  const auto dump_rows = [&](const Matrix& rows) {
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      const auto row = rows.row(i);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c != 0) out += '\t';
        format_value(out, row[c]);
      }
      out += '\n';
    }
  };
  dump_rows(model.users);
  dump_rows(model.items);

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write checkpoint: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("short write: " + path.string());
}

EmbeddingModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read checkpoint: " + path.string());
  std::string header;
  std::getline(file, header);
  std::istringstream head(header);
  std::string magic, version;
  std::size_t num_users = 0, num_items = 0, dim = 0;
  double radius = 0.0;
  head >> magic >> version >> num_users >> num_items >> dim >> radius;
  if (!head || magic != "sfcml-embeddings" || version != "v1") {
    throw IoError("not an sfcml-embeddings v1 checkpoint: " + path.string());
  }
  EmbeddingModel model;
  model.users = Matrix(num_users, dim);
  model.items = Matrix(num_items, dim);
  model.radius = radius;
  std::string line;
  const auto read_rows = [&](Matrix& rows, const char* what) {
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      if (!std::getline(file, line)) {
        throw IoError("truncated checkpoint (" + std::string(what) + " row " +
                      std::to_string(i) + "): " + path.string());
      }
      const char* cursor = line.data();
      const char* end = line.data() + line.size();
      auto row = rows.row(i);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c != 0) {
          if (cursor == end || *cursor != '\t') {
            throw IoError("bad checkpoint row: " + path.string());
          }
          ++cursor;
        }
        const auto [next, ec] = std::from_chars(cursor, end, row[c]);
        if (ec != std::errc()) throw IoError("bad checkpoint value: " + path.string());
        cursor = next;
      }
      if (cursor != end) throw IoError("trailing data in checkpoint row: " + path.string());
    }
  };
  read_rows(model.users, "user");
  read_rows(model.items, "item");
  return model;
}

}  // namespace sfcml
