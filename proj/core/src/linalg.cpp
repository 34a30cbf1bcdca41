#include "selfcma/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "SymMatrix needs a square matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteState, "SymMatrix with non-finite entries");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

Matrix EigenDecomp::reconstruct() const {
  return basis * eigenvalues.asDiagonal() * basis.transpose();
}

EigenDecomp sym_eigen(const SymMatrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPositiveDefinite, "eigen solver did not converge");
  }
  EigenDecomp d{solver.eigenvectors(), solver.eigenvalues()};
  const double hi = d.eigenvalues.maxCoeff();
  const double lo = d.eigenvalues.minCoeff();
  if (!(hi > 0.0) || !(lo > kEigenFloorRatio * hi)) {
    throw Error(ErrorCode::NonPositiveDefinite,
                "eigenvalue range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return d;
}

SymMatrix inv_sqrt(const EigenDecomp& d) {
  if (d.eigenvalues.size() == 0 || !(d.eigenvalues.minCoeff() > 0.0)) {
    throw Error(ErrorCode::NonPositiveDefinite, "inv_sqrt of a non-positive spectrum");
  }
  const Vector s = d.eigenvalues.cwiseSqrt().cwiseInverse();
  return SymMatrix(d.basis * s.asDiagonal() * d.basis.transpose());
}

SymMatrix sqrt_matrix(const EigenDecomp& d) {
  const Vector s = d.eigenvalues.cwiseSqrt();
  return SymMatrix(d.basis * s.asDiagonal() * d.basis.transpose());
}

double mahalanobis(const Vector& x, const Vector& m, const SymMatrix& inv_sqrt_c) {
  if (x.size() != m.size() || x.size() != inv_sqrt_c.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "mahalanobis: x has " + std::to_string(x.size()) +
                                                  ", m has " + std::to_string(m.size()) +
                                                  ", matrix has " +
                                                  std::to_string(inv_sqrt_c.dim()));
  }
  return (inv_sqrt_c.matrix() * (x - m)).norm();
}

}  // namespace selfcma
