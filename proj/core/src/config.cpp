#include "sfcml/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "sfcml/errors.hpp"

namespace sfcml {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
  return std::string(s.substr(begin, end - begin));
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidValueError(key + " = '" + text + "' is not a finite real");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidValueError(key + " = '" + text + "' is not a valid integer");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw InvalidValueError(key + " = '" + text + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) {
      parts.push_back(trim(std::string_view(text).substr(start)));
      break;
    }
    parts.push_back(trim(std::string_view(text).substr(start, pos - start)));
    start = pos + 1;
  }
  return parts;
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeySpec {
  Setter set;
  Getter get;
};

const std::map<std::string, KeySpec>& key_registry() {
  static const std::map<std::string, KeySpec> registry = {
      {"dataset.path",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.dataset_path = v; },
        [](const RunConfig& c) { return c.dataset_path; }}},
      {"dataset.delimiter",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "tab" && v != "::" && v.size() != 1) {
            throw InvalidValueError(k + " must be 'tab', '::', or a single character");
          }
          c.dataset_delimiter = v;
        },
        [](const RunConfig& c) { return c.dataset_delimiter; }}},
      {"dataset.threshold",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.dataset_threshold = parse_real(k, v);
        },
        [](const RunConfig& c) { return format_real(c.dataset_threshold); }}},
      {"dataset.min_interactions",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.dataset_min_interactions = parse_int<std::size_t>(k, v);
          if (c.dataset_min_interactions < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.dataset_min_interactions); }}},
      {"split.seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.split_seed = parse_int<std::uint64_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.split_seed); }}},
      {"split.ratios",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          const auto parts = split_list(v);
          if (parts.size() != 3) throw InvalidValueError(k + " needs 'train,val,test'");
          c.split_ratios.train = parse_real(k, parts[0]);
          c.split_ratios.validation = parse_real(k, parts[1]);
          c.split_ratios.test = parse_real(k, parts[2]);
        },
        [](const RunConfig& c) {
          return format_real(c.split_ratios.train) + "," + format_real(c.split_ratios.validation) +
                 "," + format_real(c.split_ratios.test);
        }}},
      {"train.learning_rate",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.learning_rate = parse_real(k, v);
          if (c.train.learning_rate <= 0) throw InvalidValueError(k + " must be positive");
        },
        [](const RunConfig& c) { return format_real(c.train.learning_rate); }}},
      {"train.epochs",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.epochs = parse_int<std::size_t>(k, v);
          if (c.train.epochs < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.train.epochs); }}},
      {"train.batch_size",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.batch_size = parse_int<std::size_t>(k, v);
          if (c.train.batch_size < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.train.batch_size); }}},
      {"train.margin",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.margin = parse_real(k, v);
          if (c.train.margin <= 0) throw InvalidValueError(k + " must be positive");
        },
        [](const RunConfig& c) { return format_real(c.train.margin); }}},
      {"train.dim",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.dim = parse_int<std::size_t>(k, v);
          if (c.train.dim < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.train.dim); }}},
      {"train.radius",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.radius = parse_real(k, v);
          if (c.train.radius <= 0) throw InvalidValueError(k + " must be positive");
        },
        [](const RunConfig& c) { return format_real(c.train.radius); }}},
      {"train.patience",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.patience = parse_int<std::size_t>(k, v);
          if (c.train.patience < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.train.patience); }}},
      {"train.improvement_epsilon",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.improvement_epsilon = parse_real(k, v);
          if (c.train.improvement_epsilon < 0) throw InvalidValueError(k + " must be >= 0");
        },
        [](const RunConfig& c) { return format_real(c.train.improvement_epsilon); }}},
      {"train.seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.seed = parse_int<std::uint64_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.train.seed); }}},
      {"train.method",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "sfcml") {
            c.train.method = TrainMethod::sfcml;
          } else if (v == "sampled") {
            c.train.method = TrainMethod::sampled;
          } else {
            throw InvalidValueError(k + " must be 'sfcml' or 'sampled'");
          }
        },
        [](const RunConfig& c) {
          return c.train.method == TrainMethod::sfcml ? "sfcml" : "sampled";
        }}},
      {"train.sequential_updates",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.sequential_updates = parse_bool(k, v);
        },
        [](const RunConfig& c) { return c.train.sequential_updates ? "true" : "false"; }}},
      {"train.sampler",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "uniform") {
            c.train.sampler.kind = SamplerKind::uniform;
          } else if (v == "popularity") {
            c.train.sampler.kind = SamplerKind::popularity;
          } else if (v == "two_stage") {
            c.train.sampler.kind = SamplerKind::two_stage;
          } else if (v == "hard") {
            c.train.sampler.kind = SamplerKind::hard;
          } else {
            throw InvalidValueError(k + " must be uniform|popularity|two_stage|hard");
          }
        },
        [](const RunConfig& c) {
          switch (c.train.sampler.kind) {
            case SamplerKind::uniform: return "uniform";
            case SamplerKind::popularity: return "popularity";
            case SamplerKind::two_stage: return "two_stage";
            case SamplerKind::hard: return "hard";
          }
          return "uniform";
        }}},
      {"train.sampler_u",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.sampler.negatives_per_positive = parse_int<std::uint32_t>(k, v);
          if (c.train.sampler.negatives_per_positive < 1) {
            throw InvalidValueError(k + " must be >= 1");
          }
        },
        [](const RunConfig& c) { return std::to_string(c.train.sampler.negatives_per_positive); }}},
      {"train.sampler_candidate_multiplier",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.sampler.candidate_multiplier = parse_int<std::uint32_t>(k, v);
          if (c.train.sampler.candidate_multiplier < 1) throw InvalidValueError(k + " must be >= 1");
        },
        [](const RunConfig& c) { return std::to_string(c.train.sampler.candidate_multiplier); }}},
      {"train.sampler_with_replacement",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train.sampler.with_replacement = parse_bool(k, v);
        },
        [](const RunConfig& c) { return c.train.sampler.with_replacement ? "true" : "false"; }}},
      {"eval.ks",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.eval_ks.clear();
          for (const auto& part : split_list(v)) {
            const auto value = parse_int<std::size_t>(k, part);
            if (value < 1) throw InvalidValueError(k + " entries must be >= 1");
            c.eval_ks.push_back(value);
          }
          if (c.eval_ks.empty()) throw InvalidValueError(k + " must list at least one K");
        },
        [](const RunConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.eval_ks.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(c.eval_ks[i]);
          }
          return out;
        }}},
      {"eval.mask_mode",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "masked") {
            c.eval_mask_mode = MaskMode::masked;
          } else if (v == "unmasked") {
            c.eval_mask_mode = MaskMode::unmasked;
          } else {
            throw InvalidValueError(k + " must be 'masked' or 'unmasked'");
          }
        },
        [](const RunConfig& c) {
          return c.eval_mask_mode == MaskMode::masked ? "masked" : "unmasked";
        }}},
      {"output.dir",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
        [](const RunConfig& c) { return c.output_dir; }}},
  };
  return registry;
}

void assign(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& registry = key_registry();
  const auto it = registry.find(key);
  if (it == registry.end()) throw UnknownKeyError("unknown configuration key '" + key + "'");
  it->second.set(config, key, value);
}

}  // namespace

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      std::span<const std::string> overrides) {
  RunConfig config;
  if (path) {
    std::ifstream file(*path, std::ios::binary);
    if (!file) throw IoError("cannot read config: " + path->string());
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(file, line)) {
      ++line_number;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      std::size_t sep = trimmed.find('=');
      std::size_t value_start = sep + 1;
      if (sep == std::string::npos) {
        sep = trimmed.find('\t');
        value_start = sep + 1;
        if (sep == std::string::npos) {
          throw MalformedLineError(line_number, "expected 'key = value'");
        }
      }
      assign(config, trim(std::string_view(trimmed).substr(0, sep)),
             trim(std::string_view(trimmed).substr(value_start)));
    }
  }
  for (const std::string& entry : overrides) {
    const std::size_t sep = entry.find('=');
    if (sep == std::string::npos) {
      throw InvalidValueError("override '" + entry + "' is not key=value");
    }
    assign(config, trim(std::string_view(entry).substr(0, sep)),
           trim(std::string_view(entry).substr(sep + 1)));
  }
  if (config.dataset_path.empty()) throw MissingKeyError("missing required key dataset.path");
  if (config.train.sampler.candidate_multiplier == 0) {
    config.train.sampler.candidate_multiplier =
        default_candidate_multiplier(config.train.sampler.kind);
  }
  return config;
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [key, spec] : key_registry()) {
    entries.emplace_back(key, spec.get(config));
  }
  return entries;
}

void write_run_manifest(const RunConfig& config, const std::filesystem::path& path) {
  std::string out;
  for (const auto& [key, value] : resolved_entries(config)) {
    out += key;
    out += '\t';
    out += value;
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write run manifest: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("short write: " + path.string());
}

DatasetSplit load_dataset(const RunConfig& config) {
  std::vector<RawRating> ratings;
  if (config.dataset_delimiter == "::") {
    ratings = parse_ratings_double_colon(config.dataset_path);
  } else {
    const char delimiter = config.dataset_delimiter == "tab" ? '\t' : config.dataset_delimiter[0];
    ratings = parse_ratings(config.dataset_path, delimiter);
  }
  const auto pairs = binarize(ratings, config.dataset_threshold);
  const InteractionMatrix matrix = filter_and_reindex(pairs, config.dataset_min_interactions);
  return split_per_user(matrix, config.split_ratios, config.split_seed);
}

}  // namespace sfcml
