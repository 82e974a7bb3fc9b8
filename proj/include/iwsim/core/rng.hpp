#pragma once

#include <cstdint>
#include <random>

namespace iwsim {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Constants:
/// increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB. Used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent 64-bit seed for a sub-stream (tree, trial,
/// sweep point) from a master seed. Pure function of both arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard library distributions are not, so every variate
/// below is produced by an explicit transform of raw engine words.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n] inclusive, unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  Rng fork(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace iwsim
