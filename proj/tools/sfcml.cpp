// sfcml command-line driver: train / evaluate / verify / tv-diagnose.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfcml/config.hpp"
#include "sfcml/dataset.hpp"
#include "sfcml/errors.hpp"
#include "sfcml/metrics.hpp"
#include "sfcml/model.hpp"
#include "sfcml/rng.hpp"
#include "sfcml/samplers.hpp"
#include "sfcml/trainer.hpp"
#include "sfcml/verification.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

sfcml::RunConfig resolve_config(const CommonArgs& args) {
  std::optional<fs::path> path;
  if (!args.config_path.empty()) {
    path = fs::path(args.config_path);
  } else if (const char* env = std::getenv("SFCML_CONFIG"); env != nullptr && *env != '\0') {
    path = fs::path(env);
  }
  return sfcml::load_config(path, args.overrides);
}

std::string format_number(double value, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw sfcml::IoError("cannot write " + path.string());
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw sfcml::IoError("short write: " + path.string());
}

std::string log_to_tsv(const std::vector<sfcml::TrainLogRow>& log) {
  std::string out = "epoch\tmean_train_loss\tval_auc\tseconds\n";
  for (const auto& row : log) {
    out += std::to_string(row.epoch);
    out += '\t';
    out += format_number(row.mean_loss);
    out += '\t';
    out += format_number(row.val_auc);
    out += '\t';
    out += format_number(row.seconds, "%.3f");
    out += '\n';
  }
  return out;
}

void write_run_artifacts(const sfcml::RunConfig& config, const sfcml::DatasetSplit& split,
                         const sfcml::TrainResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  sfcml::write_run_manifest(config, dir / "run-manifest.tsv");
  sfcml::write_split_manifest(split, dir / "split-manifest.tsv");
  write_text(dir / "train-log.tsv", log_to_tsv(result.log));
  sfcml::save_checkpoint(result.best_model, dir / "best-checkpoint.tsv");
  sfcml::save_checkpoint(result.final_model, dir / "final-checkpoint.tsv");
  const sfcml::MetricsReport report = sfcml::evaluate(
      result.best_model, split, sfcml::SplitPart::test, config.eval_ks, config.eval_mask_mode);
  write_text(dir / "test-report.tsv", sfcml::to_tsv(report));
}

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& specs) {
  std::vector<GridAxis> axes;
  for (const std::string& spec : specs) {
    const std::size_t sep = spec.find('=');
    if (sep == std::string::npos) {
      throw sfcml::InvalidValueError("grid spec '" + spec + "' is not key=v1,v2,...");
    }
    GridAxis axis;
    axis.key = spec.substr(0, sep);
    std::size_t start = sep + 1;
    while (start <= spec.size()) {
      const std::size_t comma = spec.find(',', start);
      if (comma == std::string::npos) {
        axis.values.push_back(spec.substr(start));
        break;
      }
      axis.values.push_back(spec.substr(start, comma - start));
      start = comma + 1;
    }
    if (axis.values.empty()) {
      throw sfcml::InvalidValueError("grid spec '" + spec + "' lists no values");
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

int run_train(const CommonArgs& args, const std::vector<std::string>& grid_specs) {
  const std::vector<GridAxis> axes = parse_grid(grid_specs);
  std::size_t combos = 1;
  for (const GridAxis& axis : axes) combos *= axis.values.size();

  std::optional<sfcml::RunConfig> best_config;
  std::optional<sfcml::TrainResult> best_result;
  std::optional<sfcml::DatasetSplit> best_split;
  double best_auc = -1.0;

  for (std::size_t combo = 0; combo < combos; ++combo) {
    CommonArgs combo_args = args;
    std::size_t rest = combo;
    for (const GridAxis& axis : axes) {
      combo_args.overrides.push_back(axis.key + "=" + axis.values[rest % axis.values.size()]);
      rest /= axis.values.size();
    }
    sfcml::RunConfig config = resolve_config(combo_args);
    const sfcml::DatasetSplit split = sfcml::load_dataset(config);
    std::cerr << "[train] combo " << (combo + 1) << "/" << combos << ": M="
              << split.train.num_users << " N=" << split.train.num_items
              << " lr=" << config.train.learning_rate << " margin=" << config.train.margin
              << "\n";
    const sfcml::TrainResult result = sfcml::train(split, config.train);
    std::cerr << "[train] combo " << (combo + 1) << " best val AUC "
              << format_number(result.best_val_auc) << " at epoch " << result.best_epoch << " ("
              << result.log.size() << " epochs)\n";

    if (combos > 1) {
      write_run_artifacts(config, split, result,
                          fs::path(config.output_dir) / ("grid-" + std::to_string(combo)));
    }
    if (result.best_val_auc > best_auc) {
      best_auc = result.best_val_auc;
      best_config = std::move(config);
      best_result = result;
      best_split = split;
    }
  }

  write_run_artifacts(*best_config, *best_split, *best_result, fs::path(best_config->output_dir));
  const sfcml::MetricsReport report =
      sfcml::evaluate(best_result->best_model, *best_split, sfcml::SplitPart::test,
                      best_config->eval_ks, best_config->eval_mask_mode);
  std::cout << sfcml::to_tsv(report);
  return 0;
}

int run_evaluate(const CommonArgs& args, const std::string& checkpoint, const std::string& part,
                 const std::string& out_path) {
  const sfcml::RunConfig config = resolve_config(args);
  const sfcml::DatasetSplit split = sfcml::load_dataset(config);
  const sfcml::EmbeddingModel model = sfcml::load_checkpoint(checkpoint);
  const sfcml::SplitPart split_part =
      part == "validation" ? sfcml::SplitPart::validation : sfcml::SplitPart::test;
  const sfcml::MetricsReport report =
      sfcml::evaluate(model, split, split_part, config.eval_ks, config.eval_mask_mode);
  const std::string tsv = sfcml::to_tsv(report);
  if (!out_path.empty()) write_text(out_path, tsv);
  std::cout << tsv;
  return 0;
}

int run_verify(std::size_t trials, std::size_t max_n, std::uint64_t seed) {
  const sfcml::VerifyOptions lap_options{trials, std::min<std::size_t>(max_n, 200), seed};
  const sfcml::VerifyOptions loss_options{trials, max_n, seed};
  const sfcml::VerifyOptions grad_options{std::min<std::size_t>(trials, 200), max_n, seed};

  const sfcml::VerifyReport lap = sfcml::run_laplacian_suite(lap_options);
  const sfcml::VerifyReport loss = sfcml::run_loss_equivalence_suite(loss_options);
  const sfcml::VerifyReport grad = sfcml::run_gradient_suite(grad_options);

  const auto line = [](const char* name, double value, double tol, bool ok) {
    std::printf("%-28s %12.5e  tolerance %8.0e  %s\n", name, value, tol, ok ? "PASS" : "FAIL");
  };
  line("laplacian-dense-agreement", lap.lap_dense_max_abs, sfcml::kLaplacianTolerance,
       lap.lap_dense_max_abs <= sfcml::kLaplacianTolerance);
  line("laplacian-rowsum", lap.lap_rowsum_max_abs, sfcml::kLaplacianTolerance,
       lap.lap_rowsum_max_abs <= sfcml::kLaplacianTolerance);
  line("laplacian-symmetry", lap.lap_symmetry_max_abs, sfcml::kLaplacianTolerance,
       lap.lap_symmetry_max_abs <= sfcml::kLaplacianTolerance);
  line("laplacian-psd-min", lap.lap_psd_min, sfcml::kLaplacianTolerance,
       lap.lap_psd_min >= -sfcml::kLaplacianTolerance);
  line("loss-equivalence", loss.loss_equivalence_max_rel, sfcml::kLossEquivalenceTolerance,
       loss.loss_equivalence_max_rel <= sfcml::kLossEquivalenceTolerance);
  line("gradient-vs-naive", grad.grad_vs_naive_max_rel, sfcml::kGradNaiveTolerance,
       grad.grad_vs_naive_max_rel <= sfcml::kGradNaiveTolerance);
  line("gradient-vs-fd", grad.grad_vs_fd_max_rel, sfcml::kGradFdTolerance,
       grad.grad_vs_fd_max_rel <= sfcml::kGradFdTolerance);

  const bool ok = lap.passed() && loss.passed() && grad.passed();
  return ok ? 0 : 1;
}

int run_tv_diagnose(const CommonArgs& args, const std::string& sampler, int u,
                    int candidate_multiplier, bool with_replacement, const std::string& out_path) {
  CommonArgs effective = args;
  if (!sampler.empty()) effective.overrides.push_back("train.sampler=" + sampler);
  if (u > 0) effective.overrides.push_back("train.sampler_u=" + std::to_string(u));
  if (candidate_multiplier > 0) {
    effective.overrides.push_back("train.sampler_candidate_multiplier=" +
                                  std::to_string(candidate_multiplier));
  }
  if (with_replacement) effective.overrides.push_back("train.sampler_with_replacement=true");
  const sfcml::RunConfig config = resolve_config(effective);

  const sfcml::DatasetSplit split = sfcml::load_dataset(config);
  const sfcml::InteractionMatrix& train = split.train;
  const std::vector<std::uint32_t> popularity = sfcml::item_popularity(train);
  // Model-dependent samplers (two_stage, hard) score candidates against a
  // fresh projected model; nothing is trained here.
  const sfcml::EmbeddingModel model = sfcml::make_model(
      train.num_users, train.num_items, config.train.dim, config.train.radius, config.train.seed);

  std::string tsv = "user_index\tn_pos\tn_neg\td_tv\n";
  double mean = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  for (std::uint32_t user = 0; user < train.num_users; ++user) {
    const sfcml::UserGraph g = sfcml::make_user_graph(train.positives[user], train.num_items);
    if (g.n_neg < config.train.sampler.negatives_per_positive) {
      ++skipped;
      continue;
    }
    sfcml::Rng rng(sfcml::mix_seed(config.train.seed, sfcml::seed_tag::sampler, 0, user));
    std::vector<std::vector<std::uint32_t>> negatives;
    negatives.reserve(g.n_pos);
    for (const std::uint32_t pos : train.positives[user]) {
      negatives.push_back(
          sfcml::sample_negatives(config.train.sampler, model, user, pos, g, popularity, rng));
    }
    const sfcml::SamplingDistribution induced = sfcml::induced_distribution(negatives, g);
    const double tv = sfcml::tv_against_uniform(induced);
    mean += tv;
    ++evaluated;
    tsv += std::to_string(user) + "\t" + std::to_string(g.n_pos) + "\t" +
           std::to_string(g.n_neg) + "\t" + format_number(tv) + "\n";
  }
  if (evaluated == 0) throw sfcml::NoEvaluableUsersError("no user has n- >= U");
  mean /= static_cast<double>(evaluated);

  if (!out_path.empty()) {
    write_text(out_path, tsv);
  } else {
    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "tv-report.tsv", tsv);
  }
  std::cout << "mean_d_tv\t" << format_number(mean) << "\n";
  std::cout << "users_evaluated\t" << evaluated << "\n";
  if (skipped > 0) std::cout << "users_skipped\t" << skipped << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-free collaborative metric learning trainer"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, tv_args;
  std::vector<std::string> grid_specs;
  std::string checkpoint, eval_part = "test", eval_out, tv_sampler, tv_out;
  int tv_u = 0, tv_multiplier = 0;
  bool tv_with_replacement = false;
  std::size_t verify_trials = 1000, verify_max_n = 200;
  std::uint64_t verify_seed = 1;

  auto* train_cmd = app.add_subcommand("train", "Train a model and report test metrics");
  train_cmd->add_option("--config", train_args.config_path, "Config file (key = value lines)");
  train_cmd->add_option("--set", train_args.overrides, "Override key=value (repeatable)");
  train_cmd->add_option("--grid", grid_specs,
                        "Grid axis key=v1,v2,... (repeatable; best combo by validation AUC)");

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint");
  eval_cmd->add_option("--config", eval_args.config_path, "Config file");
  eval_cmd->add_option("--set", eval_args.overrides, "Override key=value (repeatable)");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--part", eval_part, "Split part: test|validation")
      ->check(CLI::IsMember({"test", "validation"}));
  eval_cmd->add_option("--out", eval_out, "Also write the report to this path");

  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle suites on synthetic instances");
  verify_cmd->add_option("--trials", verify_trials, "Trials per suite");
  verify_cmd->add_option("--max-n", verify_max_n, "Largest item count");
  verify_cmd->add_option("--seed", verify_seed, "Base seed");

  auto* tv_cmd = app.add_subcommand("tv-diagnose", "Per-user sampling-bias (total variation) report");
  tv_cmd->add_option("--config", tv_args.config_path, "Config file");
  tv_cmd->add_option("--set", tv_args.overrides, "Override key=value (repeatable)");
  tv_cmd->add_option("--sampler", tv_sampler, "uniform|popularity|two_stage|hard");
  tv_cmd->add_option("--u", tv_u, "Negatives per positive");
  tv_cmd->add_option("--candidate-multiplier", tv_multiplier, "Candidate pool factor");
  tv_cmd->add_flag("--with-replacement", tv_with_replacement, "Draw with replacement");
  tv_cmd->add_option("--out", tv_out, "Per-user report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) return run_train(train_args, grid_specs);
    if (*eval_cmd) return run_evaluate(eval_args, checkpoint, eval_part, eval_out);
    if (*verify_cmd) return run_verify(verify_trials, verify_max_n, verify_seed);
    if (*tv_cmd) {
      return run_tv_diagnose(tv_args, tv_sampler, tv_u, tv_multiplier, tv_with_replacement,
                             tv_out);
    }
  } catch (const sfcml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
