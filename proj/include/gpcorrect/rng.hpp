#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace gpc {

/// Derive an independent sub-seed for stream `index` of `master`.
///
/// The rule is splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15)).
/// Nested streams (realization r, experiment k) are derived by applying the
/// rule twice: derive_seed(derive_seed(master, r), k).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random stream with a portable output sequence.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// Uniform and normal variates are produced here rather than through
/// <random> distributions, whose algorithms vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Marsaglia polar method, spare value cached).
  double normal();

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gpc
