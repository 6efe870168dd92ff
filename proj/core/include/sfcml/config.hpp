#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfcml/dataset.hpp"
#include "sfcml/trainer.hpp"

namespace sfcml {

/// Resolved flat configuration for a run. One key=value namespace shared by
/// config files, --set overrides, and the emitted run manifest.
struct RunConfig {
  std::string dataset_path;
  std::string dataset_delimiter = "tab";  // "tab", a single character, or "::"
  double dataset_threshold = 4.0;
  std::size_t dataset_min_interactions = 5;
  std::uint64_t split_seed = 1;
  SplitRatios split_ratios;
  TrainConfig train;
  std::vector<std::size_t> eval_ks = {3, 5, 10, 20};
  MaskMode eval_mask_mode = MaskMode::masked;
  std::string output_dir = "run";
};

/// Reads `key = value` lines ('#' comments allowed; the tab-separated manifest
/// form is accepted too), applies command-line overrides on top, validates
/// every key and value. Unknown keys are rejected.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      std::span<const std::string> overrides);

/// All keys with their resolved values, sorted by key.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& config);

/// Writes the resolved configuration as a TSV manifest re-loadable by
/// load_config.
void write_run_manifest(const RunConfig& config, const std::filesystem::path& path);

/// Runs the ingestion pipeline of the resolved config:
/// parse -> binarize -> filter/reindex -> split.
DatasetSplit load_dataset(const RunConfig& config);

}  // namespace sfcml
