#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "selfcma/linalg.hpp"

namespace selfcma {

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of run `index` in a batch started from `master`:
///   splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seedable random stream.
///
/// Engine: std::mt19937_64 (MT19937-64, 312-word state, fully specified by
/// the standard, so the raw 64-bit output is reproducible across builds).
/// Uniform doubles take the top 53 bits of one engine output: (u >> 11) * 2^-53.
/// Normal draws use the Marsaglia polar method on pairs of such uniforms
/// mapped to (-1, 1); the second value of each accepted pair is cached.
/// The standard library distributions are not used because their algorithms
/// are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double unit();
  /// Uniform on [lo, hi); throws Error(InvalidRange) unless lo < hi.
  double uniform(double lo, double hi);
  double standard_normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// n independent N(0, 1) draws.
Vector standard_normal_vector(RngStream& rng, Eigen::Index n);

/// n independent draws uniform on [lo, hi).
Vector uniform_vector(RngStream& rng, Eigen::Index n, double lo, double hi);

/// Orthonormal matrix from modified Gram–Schmidt on the columns of an n×n
/// standard-normal matrix.
Matrix random_rotation(RngStream& rng, Eigen::Index n);

}  // namespace selfcma
