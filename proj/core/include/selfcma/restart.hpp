#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "selfcma/benchfns.hpp"
#include "selfcma/cmaes.hpp"
#include "selfcma/rng.hpp"
#include "selfcma/self_adapt.hpp"

namespace selfcma {

enum class StopReason {
  TargetHit,
  TolHistFun,
  TolX,
  ConditionCov,
  Stagnation,
  BudgetExhausted,
  DegenerateCov,  // eigendecomposition or state update failed
};

std::string_view to_string(StopReason r) noexcept;
std::optional<StopReason> parse_stop_reason(std::string_view s) noexcept;

struct StopConfig {
  std::int64_t max_evals = 0;
  double target_f = 1e-10;
  double tol_hist_fun = 1e-12;
  double tol_x = 2e-12;
  double max_cond = 1e14;
  /// nullopt: 100 + ⌈100 n / λ⌉ of the running segment.
  std::optional<int> stagnation_gens;

  /// tol_x = 1e-12 · σ⁰, target_f = f_opt + precision.
  static StopConfig defaults(std::int64_t max_evals, double f_opt, double precision, double sigma0);
};

/// 10 + ⌈30 n / λ⌉
int hist_fun_length(int n, int lambda);
/// 100 + ⌈100 n / λ⌉
int default_stagnation_gens(int n, int lambda);

/// First triggered criterion, in the order TargetHit, TolHistFun, TolX,
/// ConditionCov, Stagnation, BudgetExhausted. `best_f_history` holds the
/// best f of every generation of the running segment (oldest first) and
/// must not be empty. The budget counts state.eval_count.
std::optional<StopReason> check_stop(const CmaState& state, std::span<const double> best_f_history,
                                     const StopConfig& cfg);

enum class Mode { Plain, SelfAdaptive };

std::string_view to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view s) noexcept;

struct IpopConfig {
  StopConfig stop;
  double sigma0 = 2.0;
  double init_lo = -4.0;
  double init_hi = 4.0;
  SelfCmaConfig self;
};

/// Passed to the observer after every primary generation.
struct GenerationInfo {
  int segment = 0;
  std::int64_t gen = 0;    // 1-based, counted over all segments
  std::int64_t evals = 0;  // f-evaluations so far
  double best_f = 0.0;     // best ever
  double median_f = 0.0;   // lower median of this generation
  double sigma = 0.0;
  HyperVector rates;       // learning rates for the next generation
  std::optional<StopReason> stop;
};

using GenerationObserver = std::function<void(const GenerationInfo&)>;

struct RestartReport {
  int restarts = 0;
  std::vector<int> lambdas;              // per segment
  std::vector<std::int64_t> generations;  // per segment
  std::vector<StopReason> stop_reasons;   // per segment
  std::int64_t total_evals = 0;
  double best_f = 0.0;
  /// Index of the first evaluation with f ≤ target_f.
  std::optional<std::int64_t> evals_to_target;
};

/// IPOP: run until TargetHit or the budget is spent; any other stop restarts
/// with λ doubled, a fresh mean uniform in [init_lo, init_hi]ⁿ, σ⁰ and, in
/// self-adaptive mode, a fresh auxiliary optimizer.
RestartReport ipop_run(const Problem& problem, Mode mode, int lambda0, const IpopConfig& cfg,
                       RngStream& rng, const GenerationObserver& observer = {});

}  // namespace selfcma
