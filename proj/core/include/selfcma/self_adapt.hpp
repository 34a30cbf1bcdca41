#pragma once

#include <optional>
#include <vector>

#include "selfcma/cmaes.hpp"
#include "selfcma/linalg.hpp"
#include "selfcma/rng.hpp"

namespace selfcma {

/// Upper end of each adapted learning rate, and of c₁ + c_μ.
inline constexpr double kHyperUpper = 0.9;
/// Multiplier of the summed constraint violation.
inline constexpr double kPenaltyScale = 1e9;

/// The adapted learning rates (c₁, c_μ, c_c).
struct HyperVector {
  double c_1 = 0.0;
  double c_mu = 0.0;
  double c_c = 0.0;

  /// 0 ≤ each ≤ 0.9 and c₁ + c_μ ≤ 0.9
  bool feasible() const noexcept;
  bool operator==(const HyperVector&) const = default;
};

/// Componentwise c / 0.9: the auxiliary optimizer searches the unit cube.
Vector encode(const HyperVector& h);
HyperVector decode(const Vector& u);

/// 0 when feasible, otherwise 1e9 times the summed distance to each bound
/// (box bounds per coordinate plus the joint c₁ + c_μ bound).
double penalty(const HyperVector& h);

/// Clamp each coordinate into [0, 0.9], then rescale (c₁, c_μ) onto
/// c₁ + c_μ = 0.9 if the pair still exceeds it.
HyperVector project_feasible(HyperVector h);

HyperVector learning_rates(const StrategyParams& p) noexcept;
StrategyParams with_learning_rates(StrategyParams p, const HyperVector& h) noexcept;

/// Weights of the μ_sel best individuals in the auxiliary objectives.
struct SelectionWeights {
  int mu_sel = 0;
  Vector weights;

  /// w = 1/μ_sel each.
  static SelectionWeights uniform(int mu_sel);
  /// uniform(⌊λ/2⌋)
  static SelectionWeights defaults(int lambda);
};

/// −½ [n ln 2π + ln|Σ| + (x − m)ᵀ Σ⁻¹ (x − m)], Σ = cov_scaled (already σ²C).
double gaussian_logpdf(const Vector& x, const Vector& m, const SymMatrix& cov_scaled);

/// Σᵢ w_sel,i · log N(x_{i:λ}; m, cov_scaled) over the μ_sel best on f.
double g_loglikelihood(const EvaluatedPopulation& pop, const Vector& m,
                       const SymMatrix& cov_scaled, const SelectionWeights& sel);

/// Ranks of `distances` under a stable descending sort: the largest distance
/// gets rank 1, the smallest rank λ; ties keep index order.
std::vector<int> descending_ranks(const std::vector<double>& distances);

/// Rank agreement between f and likelihood for hyper-parameters `candidate`.
///
/// The step from `prev_state` (time t−1) on `pop_used` is replayed with the
/// candidate's learning rates. The newest population `pop_new` is then
/// ranked by Mahalanobis distance to the replayed distribution (largest
/// distance = rank 1), and the result is the selection-weighted sum of those
/// ranks over pop_new's μ_sel best individuals on f. Higher is better; the
/// maximum is reached when the best points are also the most likely ones.
///
/// Infeasible candidates score −penalty(candidate) without any replay.
double h_objective(const HyperVector& candidate, const CmaState& prev_state,
                   const EvaluatedPopulation& pop_used, const EvaluatedPopulation& pop_new,
                   const SelectionWeights& sel);

/// Likelihood variant of h_objective: g_loglikelihood of pop_new under the
/// replayed mean and σ²C. Same infeasibility convention.
double g_objective(const HyperVector& candidate, const CmaState& prev_state,
                   const EvaluatedPopulation& pop_used, const EvaluatedPopulation& pop_new,
                   const SelectionWeights& sel);

enum class AuxObjective { RankAgreement, LogLikelihood };

struct SelfCmaConfig {
  int lambda_h = 20;
  double aux_sigma0 = 0.2;
  /// Defaults to SelectionWeights::defaults(primary λ).
  std::optional<SelectionWeights> sel;
  AuxObjective objective = AuxObjective::RankAgreement;
};

/// Primary CMA-ES on f plus the 3-D auxiliary CMA-ES on its learning rates.
struct SelfCmaDriver {
  CmaState primary;
  CmaState aux;
  std::optional<CmaState> prev_primary;  // state at t−1, present after warm-up
  SelectionWeights sel;
  AuxObjective objective = AuxObjective::RankAgreement;

  int lambda_h() const noexcept { return aux.params.lambda; }
};

/// Sets up both optimizers: the auxiliary starts at a mean uniform in
/// [0, 1]³ with σ = cfg.aux_sigma0, and the primary receives the projected
/// decoded mean as its learning rates.
SelfCmaDriver init_self_cma(CmaState primary, RngStream& rng, const SelfCmaConfig& cfg = {});

/// First primary generation. Afterwards prev_primary holds the initial state.
SelfCmaDriver warm_up(const Objective& f, SelfCmaDriver driver, RngStream& rng);

/// Auxiliary fitness (minimized) of one candidate in normalized units:
/// −h (or −g) when feasible, +penalty otherwise. A candidate whose replay
/// degenerates the covariance scores +∞.
double aux_fitness(const SelfCmaDriver& driver, const EvaluatedPopulation& pop_new,
                   const Vector& u);

/// One primary generation on f, then exactly one auxiliary generation on
/// h_t; the new auxiliary mean (projected) becomes the primary's
/// (c₁, c_μ, c_c). Requires warm_up.
SelfCmaDriver self_step(const Objective& f, SelfCmaDriver driver, RngStream& rng);

}  // namespace selfcma
