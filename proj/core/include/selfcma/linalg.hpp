#pragma once

#include <Eigen/Core>

namespace selfcma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Construction symmetrizes the input as (A + Aᵀ)/2
/// and rejects non-finite entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index n);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Orthonormal eigenbasis (columns) and ascending positive eigenvalues.
struct EigenDecomp {
  Matrix basis;
  Vector eigenvalues;

  Eigen::Index dim() const noexcept { return eigenvalues.size(); }
  double condition() const { return eigenvalues.maxCoeff() / eigenvalues.minCoeff(); }
  /// B · diag(λ) · Bᵀ
  Matrix reconstruct() const;
};

/// Eigenvalues at or below this fraction of the largest are treated as a
/// degenerate covariance.
inline constexpr double kEigenFloorRatio = 1e-20;

/// Throws Error(NonPositiveDefinite) when the smallest eigenvalue is
/// ≤ kEigenFloorRatio · largest (or the largest is not positive).
EigenDecomp sym_eigen(const SymMatrix& c);

/// B · diag(1/√λ) · Bᵀ
SymMatrix inv_sqrt(const EigenDecomp& d);

/// B · diag(√λ) · Bᵀ, not needed by the algorithm but handy for sampling checks.
SymMatrix sqrt_matrix(const EigenDecomp& d);

/// ‖inv_sqrt_c · (x − m)‖. No step-size division; callers only rank these.
double mahalanobis(const Vector& x, const Vector& m, const SymMatrix& inv_sqrt_c);

}  // namespace selfcma
