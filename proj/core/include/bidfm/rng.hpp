#pragma once

#include <cstdint>

namespace bidfm {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent stream key from a user seed and up to two
// coordinates (replicate index, matrix entry, ...). Used to give every
// matrix entry its own stream so parallel generation is order-independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

// Small portable generator: SplitMix64 over a Weyl sequence. All variate
// transforms are implemented here rather than through <random>
// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  // Standard normal via the Box-Muller transform.
  double normal() noexcept;
  // Poisson variate. Inversion for small means, PTRS (Hormann 1993) above.
  std::uint64_t poisson(double mean) noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bidfm
