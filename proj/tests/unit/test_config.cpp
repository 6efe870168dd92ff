#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sfcml/config.hpp"
#include "sfcml/errors.hpp"

using namespace sfcml;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("file values then override precedence") {
  const auto path = write_temp("sfcml-config.cfg",
                               "# experiment defaults\n"
                               "dataset.path = data/u.data\n"
                               "train.learning_rate = 0.01\n"
                               "train.margin = 1.5\n");
  const std::vector<std::string> overrides{"train.learning_rate=0.03"};
  const RunConfig config = load_config(path, overrides);
  CHECK(config.train.learning_rate == 0.03);
  CHECK(config.train.margin == 1.5);
  CHECK(config.dataset_path == "data/u.data");
  // untouched keys keep their defaults
  CHECK(config.train.epochs == 200);
  CHECK(config.train.batch_size == 256);
  CHECK(config.train.dim == 256);
  CHECK(config.train.patience == 15);
  CHECK(config.eval_ks == std::vector<std::size_t>{3, 5, 10, 20});
  fs::remove(path);
}

TEST_CASE("invalid values are rejected") {
  const auto path = write_temp("sfcml-bad-config.cfg",
                               "dataset.path = x\n"
                               "train.epochs = abc\n");
  CHECK_THROWS_AS(load_config(path, {}), InvalidValueError);
  fs::remove(path);

  const auto bad_ratio = write_temp("sfcml-bad-ratio.cfg",
                                    "dataset.path = x\nsplit.ratios = 0.6,0.4\n");
  CHECK_THROWS_AS(load_config(bad_ratio, {}), InvalidValueError);
  fs::remove(bad_ratio);

  const auto bad_delim = write_temp("sfcml-bad-delim.cfg",
                                    "dataset.path = x\ndataset.delimiter = ;;\n");
  CHECK_THROWS_AS(load_config(bad_delim, {}), InvalidValueError);
  fs::remove(bad_delim);
}

TEST_CASE("missing dataset path") {
  const auto path = write_temp("sfcml-pathless.cfg", "train.epochs = 5\n");
  CHECK_THROWS_AS(load_config(path, {}), MissingKeyError);
  fs::remove(path);
}

TEST_CASE("unknown keys are rejected") {
  const auto path = write_temp("sfcml-unknown.cfg", "dataset.path = x\ntrain.momentum = 0.9\n");
  CHECK_THROWS_AS(load_config(path, {}), UnknownKeyError);
  fs::remove(path);
  const std::vector<std::string> overrides{"nope=1"};
  CHECK_THROWS_AS(load_config(std::nullopt, overrides), UnknownKeyError);
}

TEST_CASE("sampler keys and per-kind candidate default") {
  const auto path = write_temp("sfcml-sampler.cfg",
                               "dataset.path = x\n"
                               "train.method = sampled\n"
                               "train.sampler = hard\n"
                               "train.sampler_u = 4\n");
  const RunConfig config = load_config(path, {});
  CHECK(config.train.method == TrainMethod::sampled);
  CHECK(config.train.sampler.kind == SamplerKind::hard);
  CHECK(config.train.sampler.negatives_per_positive == 4);
  CHECK(config.train.sampler.candidate_multiplier == 10);  // hard default
  fs::remove(path);
}

TEST_CASE("manifest round trip preserves every key") {
  const auto path = write_temp("sfcml-roundtrip.cfg",
                               "dataset.path = some/file.tsv\n"
                               "dataset.delimiter = ::\n"
                               "dataset.threshold = 3.5\n"
                               "split.seed = 9\n"
                               "train.method = sampled\n"
                               "train.sampler = popularity\n"
                               "eval.ks = 3,5\n"
                               "eval.mask_mode = unmasked\n"
                               "output.dir = out\n");
  const RunConfig config = load_config(path, {});
  const auto manifest = fs::temp_directory_path() / "sfcml-manifest-roundtrip.tsv";
  write_run_manifest(config, manifest);
  const RunConfig reloaded = load_config(manifest, {});
  CHECK(resolved_entries(config) == resolved_entries(reloaded));
  CHECK(reloaded.dataset_delimiter == "::");
  CHECK(reloaded.dataset_threshold == 3.5);
  CHECK(reloaded.eval_mask_mode == MaskMode::unmasked);
  CHECK(reloaded.eval_ks == std::vector<std::size_t>{3, 5});
  fs::remove(path);
  fs::remove(manifest);
}
