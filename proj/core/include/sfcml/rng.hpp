#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace sfcml {

// Distributions are hand-rolled on top of mt19937_64 because the standard
// library's distribution objects are implementation-defined; checkpoints and
// splits must be reproducible from the seed alone.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (seed, tag, a, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                              std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= tag * 0xd1342543de82ef95ULL;
  h ^= splitmix64(s);
  s ^= a * 0xaf251af3b0f025b5ULL;
  h ^= splitmix64(s);
  s ^= b * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  return h;
}

// Stream tags for mix_seed, one per independent consumer of randomness.
namespace seed_tag {
inline constexpr std::uint64_t init = 1;        // embedding initialization
inline constexpr std::uint64_t split = 2;       // per-user dataset split
inline constexpr std::uint64_t epoch = 3;       // epoch-level user shuffle
inline constexpr std::uint64_t sampler = 4;     // per-user negative sampling
inline constexpr std::uint64_t resample = 5;    // degenerate-row resampling
inline constexpr std::uint64_t synthetic = 6;   // synthetic instance generators
}  // namespace seed_tag

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0. Modulo bias is below 2^-32 for any
  /// n representable here and irrelevant for sampling quality.
  std::uint64_t bounded(std::uint64_t n) { return engine_() % n; }

  /// Box-Muller normal deviate.
  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Shuffles the first `count` positions (partial Fisher-Yates); the prefix
  /// is then a uniform without-replacement draw of `count` elements.
  template <typename T>
  void partial_shuffle(std::vector<T>& values, std::size_t count) {
    for (std::size_t i = 0; i < count && i + 1 < values.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(bounded(values.size() - i));
      std::swap(values[i], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sfcml
