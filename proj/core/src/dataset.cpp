#include "sfcml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <unordered_set>

#include "sfcml/errors.hpp"
#include "sfcml/rng.hpp"

namespace sfcml {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_fields_token(std::string_view line, std::string_view token) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(token, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + token.size();
  }
}

RawRating fields_to_rating(const std::vector<std::string_view>& fields, std::size_t line_number) {
  if (fields.size() != 3 && fields.size() != 4) {
    throw MalformedLineError(line_number,
                             "expected 3 or 4 fields, got " + std::to_string(fields.size()));
  }
  RawRating rating;
  rating.user = std::string(fields[0]);
  rating.item = std::string(fields[1]);
  if (rating.user.empty() || rating.item.empty()) {
    throw MalformedLineError(line_number, "empty user or item token");
  }
  const auto value = fields[2];
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rating.rating);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(rating.rating)) {
    throw MalformedLineError(line_number, "non-numeric rating '" + std::string(value) + "'");
  }
  if (fields.size() == 4) {
    const auto ts = fields[3];
    std::int64_t parsed = 0;
    const auto [tp, tec] = std::from_chars(ts.data(), ts.data() + ts.size(), parsed);
    if (tec != std::errc() || tp != ts.data() + ts.size()) {
      throw MalformedLineError(line_number, "non-integer timestamp '" + std::string(ts) + "'");
    }
    rating.timestamp = parsed;
  }
  return rating;
}

template <typename Splitter>
std::vector<RawRating> parse_with(const std::filesystem::path& path, Splitter&& split) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read ratings file: " + path.string());
  std::vector<RawRating> ratings;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ratings.push_back(fields_to_rating(split(line), line_number));
  }
  if (file.bad()) throw IoError("read error: " + path.string());
  return ratings;
}

std::string pair_key(const std::string& user, const std::string& item) {
  std::string key;
  key.reserve(user.size() + item.size() + 1);
  key += user;
  key += '\x1f';
  key += item;
  return key;
}

}  // namespace

std::vector<RawRating> parse_ratings(const std::filesystem::path& path, char delimiter) {
  return parse_with(path, [delimiter](std::string_view line) {
    return split_fields(line, delimiter);
  });
}

std::vector<RawRating> parse_ratings_double_colon(const std::filesystem::path& path) {
  return parse_with(path, [](std::string_view line) {
    return split_fields_token(line, "::");
  });
}

std::vector<std::pair<std::string, std::string>> binarize(
    std::span<const RawRating> ratings, double threshold) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::unordered_set<std::string> seen;
  for (const RawRating& r : ratings) {
    if (r.rating < threshold) continue;
    if (seen.insert(pair_key(r.user, r.item)).second) {
      pairs.emplace_back(r.user, r.item);
    }
  }
  return pairs;
}

InteractionMatrix filter_and_reindex(
    std::span<const std::pair<std::string, std::string>> pairs, std::size_t min_interactions) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& [user, item] : pairs) ++counts[user];

  std::unordered_set<std::string> banned;
  for (const auto& [user, count] : counts) {
    if (count < min_interactions) banned.insert(user);
  }

  // Dropping an all-positive user can shrink the item set, which can make
  // another user all-positive; iterate until stable.
  while (true) {
    std::unordered_set<std::string> items;
    for (const auto& [user, item] : pairs) {
      if (!banned.contains(user)) items.insert(item);
    }
    bool changed = false;
    for (const auto& [user, count] : counts) {
      if (!banned.contains(user) && count == items.size()) {
        std::cerr << "warning: dropping user '" << user
                  << "' positive on every retained item (n-=0)\n";
        banned.insert(user);
        changed = true;
      }
    }
    if (!changed) break;
  }

  InteractionMatrix matrix;
  for (const auto& [user, item] : pairs) {
    if (banned.contains(user)) continue;
    auto [user_it, user_new] = matrix.user_index.try_emplace(
        user, static_cast<std::uint32_t>(matrix.user_tokens.size()));
    if (user_new) {
      matrix.user_tokens.push_back(user);
      matrix.positives.emplace_back();
    }
    auto [item_it, item_new] = matrix.item_index.try_emplace(
        item, static_cast<std::uint32_t>(matrix.item_tokens.size()));
    if (item_new) matrix.item_tokens.push_back(item);
    matrix.positives[user_it->second].push_back(item_it->second);
  }
  if (matrix.user_tokens.empty()) {
    throw EmptyDatasetError("no user meets min_interactions=" +
                            std::to_string(min_interactions));
  }
  matrix.num_users = matrix.user_tokens.size();
  matrix.num_items = matrix.item_tokens.size();
  for (auto& list : matrix.positives) std::sort(list.begin(), list.end());
  return matrix;
}

DatasetSplit split_per_user(const InteractionMatrix& matrix, const SplitRatios& ratios,
                            std::uint64_t seed) {
  if (ratios.train <= 0.0 || ratios.validation <= 0.0 || ratios.test <= 0.0) {
    throw InvalidValueError("split ratios must all be positive");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw InvalidValueError("split ratios must sum to 1");
  }

  DatasetSplit split;
  split.train = matrix;
  split.validation.resize(matrix.num_users);
  split.test.resize(matrix.num_users);
  for (std::size_t user = 0; user < matrix.num_users; ++user) {
    std::vector<std::uint32_t> shuffled = matrix.positives[user];
    const std::size_t n = shuffled.size();
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ratios.validation * static_cast<double>(n))));
    const auto n_test = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(n))));
    if (n_val + n_test >= n) {
      throw InsufficientInteractionsError(
          user, "cannot give every split part at least one of " + std::to_string(n) +
                    " positives");
    }
    Rng rng(mix_seed(seed, seed_tag::split, user));
    rng.shuffle(shuffled);
    split.validation[user].assign(shuffled.begin(), shuffled.begin() + n_val);
    split.test[user].assign(shuffled.begin() + n_val, shuffled.begin() + n_val + n_test);
    split.train.positives[user].assign(shuffled.begin() + n_val + n_test, shuffled.end());
    std::sort(split.validation[user].begin(), split.validation[user].end());
    std::sort(split.test[user].begin(), split.test[user].end());
    std::sort(split.train.positives[user].begin(), split.train.positives[user].end());
  }
  return split;
}

void write_split_manifest(const DatasetSplit& split, const std::filesystem::path& path) {
  std::string out = "user_index\titem_index\tpart\n";
  for (std::size_t user = 0; user < split.train.num_users; ++user) {
    struct Row {
      std::uint32_t item;
      const char* part;
    };
    std::vector<Row> rows;
    rows.reserve(split.train.positives[user].size() + split.validation[user].size() +
                 split.test[user].size());
    for (const auto j : split.train.positives[user]) rows.push_back({j, "train"});
    for (const auto j : split.validation[user]) rows.push_back({j, "val"});
    for (const auto j : split.test[user]) rows.push_back({j, "test"});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.item < b.item; });
    for (const Row& row : rows) {
      out += std::to_string(user);
      out += '\t';
      out += std::to_string(row.item);
      out += '\t';
      out += row.part;
      out += '\n';
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write split manifest: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("short write: " + path.string());
}

DatasetSplit apply_split_manifest(const InteractionMatrix& full,
                                  const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read split manifest: " + path.string());

  DatasetSplit split;
  split.train = full;
  for (auto& list : split.train.positives) list.clear();
  split.validation.resize(full.num_users);
  split.test.resize(full.num_users);

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "user_index\titem_index\tpart") continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 3) throw MalformedLineError(line_number, "expected 3 columns");
    std::uint32_t user = 0, item = 0;
    const auto uf = fields[0];
    const auto itf = fields[1];
    auto [up, uec] = std::from_chars(uf.data(), uf.data() + uf.size(), user);
    auto [ip, iec] = std::from_chars(itf.data(), itf.data() + itf.size(), item);
    if (uec != std::errc() || up != uf.data() + uf.size() || iec != std::errc() ||
        ip != itf.data() + itf.size()) {
      throw MalformedLineError(line_number, "non-numeric index");
    }
    if (user >= full.num_users || item >= full.num_items) {
      throw MalformedLineError(line_number, "index out of range");
    }
    if (fields[2] == "train") {
      split.train.positives[user].push_back(item);
    } else if (fields[2] == "val") {
      split.validation[user].push_back(item);
    } else if (fields[2] == "test") {
      split.test[user].push_back(item);
    } else {
      throw MalformedLineError(line_number, "unknown part '" + std::string(fields[2]) + "'");
    }
  }

  for (std::size_t user = 0; user < full.num_users; ++user) {
    auto& train = split.train.positives[user];
    auto& val = split.validation[user];
    auto& test = split.test[user];
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    std::sort(test.begin(), test.end());
    if (train.empty() || val.empty() || test.empty()) {
      throw InsufficientInteractionsError(user, "manifest leaves a split part empty");
    }
    std::vector<std::uint32_t> merged;
    merged.reserve(train.size() + val.size() + test.size());
    merged.insert(merged.end(), train.begin(), train.end());
    merged.insert(merged.end(), val.begin(), val.end());
    merged.insert(merged.end(), test.begin(), test.end());
    std::sort(merged.begin(), merged.end());
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end() ||
        merged != full.positives[user]) {
      throw InvalidValueError("manifest is not a partition of user " + std::to_string(user) +
                              "'s positives");
    }
  }
  return split;
}

std::vector<std::uint32_t> item_popularity(const InteractionMatrix& matrix) {
  std::vector<std::uint32_t> counts(matrix.num_items, 0);
  for (const auto& list : matrix.positives) {
    for (const std::uint32_t item : list) ++counts[item];
  }
  return counts;
}

}  // namespace sfcml
