#pragma once

#include <cstdint>
#include <random>

namespace compgrad {

// Deterministic random source. All library randomness flows through this
// type so that a run is fully reproducible from a single seed. The variate
// transforms (uniform, gaussian, bounded int) are implemented here instead
// of with std::*_distribution because the standard leaves those algorithms
// implementation-defined; mt19937_64 output itself is pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Uniform on [lo, hi].
  double uniform(double lo, double hi);

  // Standard normal via the Marsaglia polar method.
  double gaussian();

  // Uniform integer on [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_gaussian_ = 0.0;
  bool has_spare_ = false;
};

// Stateless seed derivation (splitmix64 finalizer). Used to assign each
// replica of an experiment its own stream so results do not depend on
// scheduling or evaluation order.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d);

}  // namespace compgrad
