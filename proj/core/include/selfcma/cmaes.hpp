#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "selfcma/linalg.hpp"
#include "selfcma/rng.hpp"

namespace selfcma {

/// Scalar hyper-parameters of one (μ/μ_w, λ)-CMA-ES instance.
struct StrategyParams {
  int n = 0;
  int lambda = 0;
  int mu = 0;
  Vector weights;  // μ entries, non-increasing, sum to 1
  double mu_w = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
};

/// 4 + ⌊3 ln n⌋
int default_lambda(int n);

/// Default parameterization for dimension n and population size lambda
/// (default_lambda(n) when omitted):
///
///   μ    = ⌊λ/2⌋
///   wᵢ   ∝ ln(μ + ½) − ln i
///   μ_w  = 1 / Σ wᵢ²
///   c_σ  = (μ_w + 2) / (n + μ_w + 3)
///   d_σ  = 1 + c_σ + 2 max(0, √((μ_w − 1)/(n + 1)) − 1)
///   c_c  = 4 / (n + 4)
///   c₁   = 2 / ((n + 1.3)² + μ_w)
///   c_μ  = 2 (μ_w − 2 + 1/μ_w) / ((n + 2)² + μ_w)
///
/// c_μ is capped at 1 − c₁: for λ ≫ n the raw formula exceeds one (it
/// tends to 2), which would turn the decay factor of C negative.
StrategyParams default_params(int n, std::optional<int> lambda = std::nullopt);

/// √n (1 − 1/(4n) + 1/(21n²)), the approximation of E‖N(0, I)‖.
double expected_norm(int n);

/// λ evaluated candidates plus their ascending-fitness ordering. Ties keep
/// sampling order.
struct EvaluatedPopulation {
  std::vector<Vector> candidates;
  std::vector<double> fitness;
  std::vector<std::size_t> order;  // order[r] = index of the r-th best

  static EvaluatedPopulation from(std::vector<Vector> candidates, std::vector<double> fitness);

  std::size_t size() const noexcept { return candidates.size(); }
  /// r-th best candidate, r = 0 is the best.
  const Vector& ranked(std::size_t r) const { return candidates[order[r]]; }
  double ranked_fitness(std::size_t r) const { return fitness[order[r]]; }
  double best_fitness() const { return fitness[order.front()]; }
  /// Lower median of the fitness values.
  double median_fitness() const;
};

/// Complete CMA-ES state. A plain value: copying it snapshots the strategy,
/// which is how earlier generations are replayed.
struct CmaState {
  StrategyParams params;
  Vector mean;
  double sigma = 0.0;
  SymMatrix cov;
  Vector path_sigma;
  Vector path_c;
  std::int64_t gen = 0;
  EigenDecomp eigen;      // of cov
  SymMatrix inv_sqrt_cov;  // C^{-1/2}, derived from eigen
  std::optional<EvaluatedPopulation> last_pop;
  std::int64_t eval_count = 0;

  /// C = I, zero paths, t = 0.
  static CmaState initial(StrategyParams params, Vector mean, double sigma);

  Eigen::Index dim() const noexcept { return mean.size(); }
};

using Objective = std::function<double(const Vector&)>;

/// λ candidates mean + σ · B · diag(√λᵢ) · z, z ~ N(0, I). Only the RNG advances.
std::vector<Vector> sample_population(const CmaState& state, RngStream& rng);

/// One distribution update from an evaluated population: new mean, both
/// evolution paths with the h_σ stall, rank-one plus rank-μ covariance update
/// (literal form, without the (1 − h_σ) correction), CSA step-size, t + 1,
/// fresh eigendecomposition. C^{-1/2} in the σ-path is the one of the
/// incoming state.
///
/// Replaying this on a copy of an older state with substituted learning
/// rates is exactly the "reproduce a generation" step of the self-adaptive
/// scheme.
CmaState update_distribution(const CmaState& state, const EvaluatedPopulation& pop);

/// Sample, evaluate, update. eval_count grows by λ.
CmaState generation(const Objective& objective, const CmaState& state, RngStream& rng);

}  // namespace selfcma
