#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfcma/linalg.hpp"
#include "selfcma/rng.hpp"

namespace selfcma {

/// A test function with its optimum location. Immutable once built.
struct Problem {
  std::string name;
  int n = 0;
  Vector x_opt;
  double f_opt = 0.0;
  std::optional<Matrix> rotation;
  std::function<double(const Vector&)> evaluator;

  double operator()(const Vector& x) const { return evaluator(x); }
};

/// Σ zᵢ², z = x − x_opt
Problem sphere(int n, Vector x_opt);

/// Σ_{i<n} 100 (zᵢ² − zᵢ₊₁)² + (zᵢ − 1)², z = x − x_opt + 1
Problem rosenbrock(int n, Vector x_opt);

/// Σ 10^{6(i−1)/(n−1)} zᵢ², z = R (x − x_opt)
Problem rotated_ellipsoid(int n, Vector x_opt, Matrix rotation);

/// z₁² + 100 ‖(z₂, …, zₙ)‖, z = R (x − x_opt)
Problem sharp_ridge(int n, Vector x_opt, Matrix rotation);

/// Names accepted by make_problem and the CLI.
const std::vector<std::string_view>& problem_names();

/// Builds a named problem with x_opt uniform in [−4, 4]ⁿ and, for the
/// rotated functions, a fresh random rotation, both drawn from `rng`.
/// Throws Error(ConfigError) for an unknown name.
Problem make_problem(std::string_view name, int n, RngStream& rng);

}  // namespace selfcma
