#pragma once

#include <cstddef>
#include <cstdint>

namespace milkspec {

/// SplitMix64 stream. Every draw is defined by integer arithmetic, so a seed
/// gives the same sequence on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n);
  /// Standard normal (Box–Muller, second value cached).
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline SplitMix64 seeded_rng(std::uint64_t seed) { return SplitMix64(seed); }

/// Independent child seed for stream `index` (trees, folds, replicates).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace milkspec
