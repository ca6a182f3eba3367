#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace prefregret {

/// SplitMix64 finalizer; derives independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0,1) that is a pure function of (seed, index).
double uniform_at(std::uint64_t seed, std::uint64_t index);

/// Seeded generator threaded through every sampling operation.
///
/// Conversions from raw 64-bit draws are done here rather than through the
/// <random> distributions so that streams are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace prefregret
