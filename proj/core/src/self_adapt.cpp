#include "selfcma/self_adapt.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

bool HyperVector::feasible() const noexcept {
  const auto in_box = [](double c) { return c >= 0.0 && c <= kHyperUpper; };
  return in_box(c_1) && in_box(c_mu) && in_box(c_c) && c_1 + c_mu <= kHyperUpper;
}

Vector encode(const HyperVector& h) {
  return Vector{{h.c_1 / kHyperUpper, h.c_mu / kHyperUpper, h.c_c / kHyperUpper}};
}

HyperVector decode(const Vector& u) {
  if (u.size() != 3) {
    throw Error(ErrorCode::DimensionMismatch, "decode expects 3 values, got " + std::to_string(u.size()));
  }
  return {kHyperUpper * u(0), kHyperUpper * u(1), kHyperUpper * u(2)};
}

double penalty(const HyperVector& h) {
  double v = 0.0;
  for (double c : {h.c_1, h.c_mu, h.c_c}) {
    v += std::max(0.0, -c) + std::max(0.0, c - kHyperUpper);
  }
  v += std::max(0.0, h.c_1 + h.c_mu - kHyperUpper);
  return kPenaltyScale * v;
}

HyperVector project_feasible(HyperVector h) {
  h.c_1 = std::clamp(h.c_1, 0.0, kHyperUpper);
  h.c_mu = std::clamp(h.c_mu, 0.0, kHyperUpper);
  h.c_c = std::clamp(h.c_c, 0.0, kHyperUpper);
  const double joint = h.c_1 + h.c_mu;
  if (joint > kHyperUpper) {
    h.c_1 *= kHyperUpper / joint;
    h.c_mu *= kHyperUpper / joint;
    while (h.c_1 + h.c_mu > kHyperUpper) h.c_mu = std::nextafter(h.c_mu, 0.0);
  }
  return h;
}

HyperVector learning_rates(const StrategyParams& p) noexcept { return {p.c_1, p.c_mu, p.c_c}; }

StrategyParams with_learning_rates(StrategyParams p, const HyperVector& h) noexcept {
  p.c_1 = h.c_1;
  p.c_mu = h.c_mu;
  p.c_c = h.c_c;
  return p;
}

SelectionWeights SelectionWeights::uniform(int mu_sel) {
  if (mu_sel < 1) throw Error(ErrorCode::InvalidRange, "mu_sel must be >= 1");
  return {mu_sel, Vector::Constant(mu_sel, 1.0 / mu_sel)};
}

SelectionWeights SelectionWeights::defaults(int lambda) { return uniform(std::max(1, lambda / 2)); }

double gaussian_logpdf(const Vector& x, const Vector& m, const SymMatrix& cov_scaled) {
  const Eigen::Index n = x.size();
  if (m.size() != n || cov_scaled.dim() != n) {
    throw Error(ErrorCode::DimensionMismatch, "gaussian_logpdf dimension mismatch");
  }
  const Eigen::LLT<Matrix> llt(cov_scaled.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPositiveDefinite, "covariance has no Cholesky factor");
  }
  const Matrix& l = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  const Vector z = llt.matrixL().solve(x - m);
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

namespace {

void check_selection(const EvaluatedPopulation& pop, const SelectionWeights& sel) {
  if (sel.mu_sel < 1 || static_cast<std::size_t>(sel.mu_sel) > pop.size() ||
      sel.weights.size() != sel.mu_sel) {
    throw Error(ErrorCode::DimensionMismatch, "mu_sel=" + std::to_string(sel.mu_sel) +
                                                  " does not fit a population of " +
                                                  std::to_string(pop.size()));
  }
}

// θ'ᵗ: the t−1 → t step redone with the candidate learning rates.
CmaState replay(const HyperVector& candidate, const CmaState& prev_state,
                const EvaluatedPopulation& pop_used) {
  CmaState alt = prev_state;
  alt.params = with_learning_rates(alt.params, candidate);
  return update_distribution(alt, pop_used);
}

}  // namespace

double g_loglikelihood(const EvaluatedPopulation& pop, const Vector& m, const SymMatrix& cov_scaled,
                       const SelectionWeights& sel) {
  check_selection(pop, sel);
  double g = 0.0;
  for (int i = 0; i < sel.mu_sel; ++i) {
    g += sel.weights(i) * gaussian_logpdf(pop.ranked(static_cast<std::size_t>(i)), m, cov_scaled);
  }
  return g;
}

std::vector<int> descending_ranks(const std::vector<double>& distances) {
  std::vector<std::size_t> idx(distances.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return distances[a] > distances[b]; });
  std::vector<int> ranks(distances.size());
  for (std::size_t r = 0; r < idx.size(); ++r) ranks[idx[r]] = static_cast<int>(r + 1);
  return ranks;
}

double h_objective(const HyperVector& candidate, const CmaState& prev_state,
                   const EvaluatedPopulation& pop_used, const EvaluatedPopulation& pop_new,
                   const SelectionWeights& sel) {
  if (!candidate.feasible()) return -penalty(candidate);
  check_selection(pop_new, sel);

  const CmaState alt = replay(candidate, prev_state, pop_used);
  std::vector<double> d(pop_new.size());
  for (std::size_t i = 0; i < pop_new.size(); ++i) {
    d[i] = mahalanobis(pop_new.candidates[i], alt.mean, alt.inv_sqrt_cov);
  }
  const std::vector<int> ranks = descending_ranks(d);

  double h = 0.0;
  for (int i = 0; i < sel.mu_sel; ++i) {
    h += sel.weights(i) * ranks[pop_new.order[static_cast<std::size_t>(i)]];
  }
  return h;
}

double g_objective(const HyperVector& candidate, const CmaState& prev_state,
                   const EvaluatedPopulation& pop_used, const EvaluatedPopulation& pop_new,
                   const SelectionWeights& sel) {
  if (!candidate.feasible()) return -penalty(candidate);
  const CmaState alt = replay(candidate, prev_state, pop_used);
  const SymMatrix cov_scaled(alt.sigma * alt.sigma * alt.cov.matrix());
  return g_loglikelihood(pop_new, alt.mean, cov_scaled, sel);
}

SelfCmaDriver init_self_cma(CmaState primary, RngStream& rng, const SelfCmaConfig& cfg) {
  SelfCmaDriver d;
  d.sel = cfg.sel.value_or(SelectionWeights::defaults(primary.params.lambda));
  if (static_cast<std::size_t>(d.sel.mu_sel) > static_cast<std::size_t>(primary.params.lambda)) {
    throw Error(ErrorCode::InvalidRange, "mu_sel exceeds the primary population size");
  }
  d.objective = cfg.objective;
  d.aux = CmaState::initial(default_params(3, cfg.lambda_h), uniform_vector(rng, 3, 0.0, 1.0),
                            cfg.aux_sigma0);
  primary.params = with_learning_rates(primary.params, project_feasible(decode(d.aux.mean)));
  d.primary = std::move(primary);
  return d;
}

SelfCmaDriver warm_up(const Objective& f, SelfCmaDriver driver, RngStream& rng) {
  CmaState next = generation(f, driver.primary, rng);
  driver.prev_primary = std::move(driver.primary);
  driver.primary = std::move(next);
  return driver;
}

double aux_fitness(const SelfCmaDriver& driver, const EvaluatedPopulation& pop_new, const Vector& u) {
  if (!driver.prev_primary || !driver.primary.last_pop) {
    throw Error(ErrorCode::InvalidRange, "auxiliary fitness needs a warmed-up driver");
  }
  const HyperVector h = decode(u);
  if (!h.feasible()) return penalty(h);
  try {
    const double score =
        driver.objective == AuxObjective::RankAgreement
            ? h_objective(h, *driver.prev_primary, *driver.primary.last_pop, pop_new, driver.sel)
            : g_objective(h, *driver.prev_primary, *driver.primary.last_pop, pop_new, driver.sel);
    return -score;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonPositiveDefinite || e.code() == ErrorCode::NonFiniteState) {
      return std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

SelfCmaDriver self_step(const Objective& f, SelfCmaDriver driver, RngStream& rng) {
  if (!driver.prev_primary) {
    throw Error(ErrorCode::InvalidRange, "self_step before warm_up");
  }
  CmaState next = generation(f, driver.primary, rng);
  const EvaluatedPopulation& pop_new = *next.last_pop;

  std::vector<Vector> us = sample_population(driver.aux, rng);
  std::vector<double> scores;
  scores.reserve(us.size());
  for (const Vector& u : us) scores.push_back(aux_fitness(driver, pop_new, u));
  CmaState aux = update_distribution(driver.aux, EvaluatedPopulation::from(std::move(us), std::move(scores)));
  aux.eval_count = driver.aux.eval_count + driver.aux.params.lambda;

  next.params = with_learning_rates(next.params, project_feasible(decode(aux.mean)));
  driver.aux = std::move(aux);
  driver.prev_primary = std::move(driver.primary);
  driver.primary = std::move(next);
  return driver;
}

}  // namespace selfcma
