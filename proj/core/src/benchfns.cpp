#include "selfcma/benchfns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

namespace {

void check_dims(int n, int min_n, const Vector& x_opt, const char* fn) {
  if (n < min_n) {
    throw Error(ErrorCode::InvalidDimension,
                std::string(fn) + " needs n >= " + std::to_string(min_n) + ", got " + std::to_string(n));
  }
  if (x_opt.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(fn) + ": x_opt has wrong dimension");
  }
}

void check_rotation(int n, const Matrix& r, const char* fn) {
  if (r.rows() != n || r.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(fn) + ": rotation must be n x n");
  }
}

}  // namespace

Problem sphere(int n, Vector x_opt) {
  check_dims(n, 1, x_opt, "sphere");
  Problem p{"sphere", n, x_opt, 0.0, std::nullopt, {}};
  p.evaluator = [x_opt = std::move(x_opt)](const Vector& x) { return (x - x_opt).squaredNorm(); };
  return p;
}

Problem rosenbrock(int n, Vector x_opt) {
  check_dims(n, 2, x_opt, "rosenbrock");
  Problem p{"rosenbrock", n, x_opt, 0.0, std::nullopt, {}};
  p.evaluator = [x_opt = std::move(x_opt)](const Vector& x) {
    const Vector z = (x - x_opt).array() + 1.0;
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
      const double a = z(i) * z(i) - z(i + 1);
      const double b = z(i) - 1.0;
      f += 100.0 * a * a + b * b;
    }
    return f;
  };
  return p;
}

Problem rotated_ellipsoid(int n, Vector x_opt, Matrix rotation) {
  check_dims(n, 2, x_opt, "rotated_ellipsoid");
  check_rotation(n, rotation, "rotated_ellipsoid");
  Vector scale(n);
  for (int i = 0; i < n; ++i) scale(i) = std::pow(10.0, 6.0 * i / (n - 1.0));
  Problem p{"ellipsoid", n, x_opt, 0.0, rotation, {}};
  p.evaluator = [x_opt = std::move(x_opt), r = std::move(rotation), scale](const Vector& x) {
    const Vector z = r * (x - x_opt);
    return scale.dot(z.cwiseAbs2());
  };
  return p;
}

Problem sharp_ridge(int n, Vector x_opt, Matrix rotation) {
  check_dims(n, 2, x_opt, "sharp_ridge");
  check_rotation(n, rotation, "sharp_ridge");
  Problem p{"sharpridge", n, x_opt, 0.0, rotation, {}};
  p.evaluator = [x_opt = std::move(x_opt), r = std::move(rotation)](const Vector& x) {
    const Vector z = r * (x - x_opt);
    return z(0) * z(0) + 100.0 * z.tail(z.size() - 1).norm();
  };
  return p;
}

const std::vector<std::string_view>& problem_names() {
  static const std::vector<std::string_view> names{"sphere", "rosenbrock", "ellipsoid", "sharpridge"};
  return names;
}

Problem make_problem(std::string_view name, int n, RngStream& rng) {
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorCode::ConfigError, "unknown problem '" + std::string(name) + "'");
  }
  if (n < 1) throw Error(ErrorCode::InvalidDimension, "dimension must be >= 1");
  Vector x_opt = uniform_vector(rng, n, -4.0, 4.0);
  if (name == "sphere") return sphere(n, std::move(x_opt));
  if (name == "rosenbrock") return rosenbrock(n, std::move(x_opt));
  Matrix r = random_rotation(rng, n);
  if (name == "ellipsoid") return rotated_ellipsoid(n, std::move(x_opt), std::move(r));
  return sharp_ridge(n, std::move(x_opt), std::move(r));
}

}  // namespace selfcma
