#include "selfcma/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

int default_lambda(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidDimension, "n must be >= 1, got " + std::to_string(n));
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

StrategyParams default_params(int n, std::optional<int> lambda) {
  if (n < 1) throw Error(ErrorCode::InvalidDimension, "n must be >= 1, got " + std::to_string(n));
  const int lam = lambda.value_or(default_lambda(n));
  if (lam < 2) throw Error(ErrorCode::InvalidLambda, "lambda must be >= 2, got " + std::to_string(lam));

  StrategyParams p;
  p.n = n;
  p.lambda = lam;
  p.mu = lam / 2;
  p.weights.resize(p.mu);
  const double log_half = std::log(p.mu + 0.5);
  for (int i = 0; i < p.mu; ++i) p.weights(i) = log_half - std::log(i + 1.0);
  p.weights /= p.weights.sum();
  p.mu_w = 1.0 / p.weights.squaredNorm();

  const double nd = n;
  p.c_sigma = (p.mu_w + 2.0) / (nd + p.mu_w + 3.0);
  p.d_sigma = 1.0 + p.c_sigma + 2.0 * std::max(0.0, std::sqrt((p.mu_w - 1.0) / (nd + 1.0)) - 1.0);
  p.c_c = 4.0 / (nd + 4.0);
  p.c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + p.mu_w);
  p.c_mu = std::min(1.0 - p.c_1,
                    2.0 * (p.mu_w - 2.0 + 1.0 / p.mu_w) / ((nd + 2.0) * (nd + 2.0) + p.mu_w));
  return p;
}

double expected_norm(int n) {
  const double nd = n;
  return std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
}

EvaluatedPopulation EvaluatedPopulation::from(std::vector<Vector> candidates,
                                              std::vector<double> fitness) {
  if (candidates.size() != fitness.size()) {
    throw Error(ErrorCode::DimensionMismatch, "population has " + std::to_string(candidates.size()) +
                                                  " candidates but " +
                                                  std::to_string(fitness.size()) + " fitness values");
  }
  EvaluatedPopulation pop{std::move(candidates), std::move(fitness), {}};
  pop.order.resize(pop.fitness.size());
  std::iota(pop.order.begin(), pop.order.end(), std::size_t{0});
  std::stable_sort(pop.order.begin(), pop.order.end(),
                   [&](std::size_t a, std::size_t b) { return pop.fitness[a] < pop.fitness[b]; });
  return pop;
}

double EvaluatedPopulation::median_fitness() const {
  if (order.empty()) throw Error(ErrorCode::EmptyInput, "median of an empty population");
  return fitness[order[(order.size() - 1) / 2]];
}

namespace {

void refresh_eigen(CmaState& s) {
  s.eigen = sym_eigen(s.cov);
  s.inv_sqrt_cov = inv_sqrt(s.eigen);
}

void check_finite(const CmaState& s) {
  if (!s.mean.allFinite() || !std::isfinite(s.sigma) || !(s.sigma > 0.0) ||
      !s.path_sigma.allFinite() || !s.path_c.allFinite()) {
    throw Error(ErrorCode::NonFiniteState,
                "state after generation " + std::to_string(s.gen) + " is not finite");
  }
}

}  // namespace

CmaState CmaState::initial(StrategyParams params, Vector mean, double sigma) {
  if (mean.size() != params.n) {
    throw Error(ErrorCode::DimensionMismatch, "initial mean has dimension " +
                                                  std::to_string(mean.size()) + ", params say " +
                                                  std::to_string(params.n));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidRange, "initial sigma must be positive and finite");
  }
  CmaState s;
  const Eigen::Index n = params.n;
  s.params = std::move(params);
  s.mean = std::move(mean);
  s.sigma = sigma;
  s.cov = SymMatrix::identity(n);
  s.path_sigma = Vector::Zero(n);
  s.path_c = Vector::Zero(n);
  refresh_eigen(s);
  return s;
}

std::vector<Vector> sample_population(const CmaState& state, RngStream& rng) {
  if (state.eigen.dim() != state.dim()) {
    throw Error(ErrorCode::NonPositiveDefinite, "eigen cache does not match the covariance");
  }
  const Matrix scale = state.eigen.basis * state.eigen.eigenvalues.cwiseSqrt().asDiagonal();
  std::vector<Vector> xs;
  xs.reserve(static_cast<std::size_t>(state.params.lambda));
  for (int k = 0; k < state.params.lambda; ++k) {
    xs.push_back(state.mean + state.sigma * (scale * standard_normal_vector(rng, state.dim())));
  }
  return xs;
}

CmaState update_distribution(const CmaState& state, const EvaluatedPopulation& pop) {
  const StrategyParams& p = state.params;
  const Eigen::Index n = state.dim();
  if (pop.size() != static_cast<std::size_t>(p.lambda) || pop.order.size() != pop.size()) {
    throw Error(ErrorCode::DimensionMismatch, "population of " + std::to_string(pop.size()) +
                                                  " for lambda " + std::to_string(p.lambda));
  }
  for (const Vector& x : pop.candidates) {
    if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "candidate dimension mismatch");
  }
  if (p.c_1 < 0.0 || p.c_mu < 0.0 || p.c_1 + p.c_mu > 1.0) {
    throw Error(ErrorCode::InvalidRange, "learning rates c1=" + std::to_string(p.c_1) +
                                             " cmu=" + std::to_string(p.c_mu) +
                                             " leave the decay factor outside [0, 1]");
  }

  CmaState next = state;

  // Steps of the μ best, in the frame of the incoming mean and step-size.
  Matrix steps(n, p.mu);
  Vector mean = Vector::Zero(n);
  for (int i = 0; i < p.mu; ++i) {
    const Vector& x = pop.ranked(static_cast<std::size_t>(i));
    mean += p.weights(i) * x;
    steps.col(i) = (x - state.mean) / state.sigma;
  }
  const Vector mean_step = (mean - state.mean) / state.sigma;

  const double e_norm = expected_norm(p.n);
  next.path_sigma = (1.0 - p.c_sigma) * state.path_sigma +
                    std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_w) *
                        (state.inv_sqrt_cov.matrix() * mean_step);
  const double ps_norm = next.path_sigma.norm();

  const double t1 = static_cast<double>(state.gen + 1);
  const bool h_sigma = ps_norm < std::sqrt(1.0 - std::pow(1.0 - p.c_sigma, 2.0 * t1)) *
                                     (1.4 + 2.0 / (p.n + 1.0)) * e_norm;

  next.path_c = (1.0 - p.c_c) * state.path_c;
  if (h_sigma) next.path_c += std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_w) * mean_step;

  const Matrix rank_mu = steps * p.weights.asDiagonal() * steps.transpose();
  const Matrix cov = (1.0 - p.c_1 - p.c_mu) * state.cov.matrix() +
                     p.c_1 * (next.path_c * next.path_c.transpose()) + p.c_mu * rank_mu;

  next.sigma = state.sigma * std::exp((p.c_sigma / p.d_sigma) * (ps_norm / e_norm - 1.0));
  next.mean = std::move(mean);
  next.gen = state.gen + 1;
  check_finite(next);
  next.cov = SymMatrix(cov);
  refresh_eigen(next);
  next.last_pop = pop;
  return next;
}

CmaState generation(const Objective& objective, const CmaState& state, RngStream& rng) {
  std::vector<Vector> xs = sample_population(state, rng);
  std::vector<double> fs;
  fs.reserve(xs.size());
  for (const Vector& x : xs) {
    const double f = objective(x);
    if (std::isnan(f)) {
      throw Error(ErrorCode::NonFiniteFitness,
                  "objective returned NaN at generation " + std::to_string(state.gen));
    }
    fs.push_back(f);
  }
  CmaState next = update_distribution(state, EvaluatedPopulation::from(std::move(xs), std::move(fs)));
  next.eval_count = state.eval_count + state.params.lambda;
  return next;
}

}  // namespace selfcma
