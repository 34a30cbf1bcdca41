#include "selfcma/rng.hpp"

#include <cmath>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RngStream::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidRange,
                "uniform(" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  const double v = lo + (hi - lo) * unit();
  // lo + (hi - lo) * u can round up to hi for u close to 1.
  return v < hi ? v : std::nextafter(hi, lo);
}

double RngStream::standard_normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * unit() - 1.0;
    v = 2.0 * unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  return u * factor;
}

Vector standard_normal_vector(RngStream& rng, Eigen::Index n) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.standard_normal();
  return z;
}

Vector uniform_vector(RngStream& rng, Eigen::Index n, double lo, double hi) {
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = rng.uniform(lo, hi);
  return u;
}

Matrix random_rotation(RngStream& rng, Eigen::Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidDimension, "random_rotation needs n >= 1");
  Matrix q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) q.col(j) = standard_normal_vector(rng, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  // A second pass brings BᵀB = I down to round-off for larger n.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return q;
}

}  // namespace selfcma
