#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace pcpred {

/// Seeded generator used by every randomized step (masking, outliers, ALS
/// initialization). The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; the conversions to doubles and bounded integers are
/// implemented here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

  /// Uniform integer in [0, n); n must be positive. Rejection sampling, no bias.
  std::size_t below(std::size_t n);

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64-based mixing of a base seed with stream identifiers, so that
/// (fraction, repeat) pairs in a sweep get independent reproducible streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace pcpred
