#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sfcml {

struct RawRating {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;
};

/// Dense-indexed implicit feedback: per-user strictly increasing positive
/// item lists over users [0, M) and items [0, N), with 0 < n+ < N for every
/// retained user.
struct InteractionMatrix {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<std::vector<std::uint32_t>> positives;  // per user, sorted
  std::vector<std::string> user_tokens;               // index -> token
  std::vector<std::string> item_tokens;
  std::unordered_map<std::string, std::uint32_t> user_index;  // token -> index
  std::unordered_map<std::string, std::uint32_t> item_index;

  std::size_t positives_of(std::size_t user) const { return positives[user].size(); }
};

/// Per-user train/validation/test partition of the positive sets, all over
/// the same (M, N) index space.
struct DatasetSplit {
  InteractionMatrix train;
  std::vector<std::vector<std::uint32_t>> validation;  // per user, sorted
  std::vector<std::vector<std::uint32_t>> test;
};

/// One record per non-empty line: user, item, rating, optional timestamp,
/// separated by a single-character delimiter. Lines starting with '#' are
/// skipped. Wrong field count or a non-numeric field raises MalformedLine.
std::vector<RawRating> parse_ratings(const std::filesystem::path& path, char delimiter);

/// Same contract for files using the MovieLens-1m "::" two-character
/// separator, pre-split on the token.
std::vector<RawRating> parse_ratings_double_colon(const std::filesystem::path& path);

/// (user, item) pairs with rating >= threshold, duplicates collapsed,
/// first-appearance order preserved.
std::vector<std::pair<std::string, std::string>> binarize(
    std::span<const RawRating> ratings, double threshold);

/// Drops users with fewer than min_interactions positives, restricts the item
/// set to items of surviving pairs, drops users positive on every retained
/// item (warning to stderr), and assigns dense indices in first-appearance
/// order. Iterates to a fixpoint since each drop can shrink the item set.
InteractionMatrix filter_and_reindex(
    std::span<const std::pair<std::string, std::string>> pairs, std::size_t min_interactions);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

/// Per-user split: positives are shuffled by a generator seeded from
/// (seed, user index); validation and test each get max(1, floor(ratio*n+))
/// items, the remainder goes to train.
DatasetSplit split_per_user(const InteractionMatrix& matrix, const SplitRatios& ratios,
                            std::uint64_t seed);

/// TSV manifest with columns (user_index, item_index, part).
void write_split_manifest(const DatasetSplit& split, const std::filesystem::path& path);

/// Rebuilds a split of `full` from a manifest, validating that the parts
/// partition each user's positive set.
DatasetSplit apply_split_manifest(const InteractionMatrix& full, const std::filesystem::path& path);

/// Train-split interaction count per item (popularity profile for samplers).
std::vector<std::uint32_t> item_popularity(const InteractionMatrix& matrix);

}  // namespace sfcml
