#include "selfcma/restart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "selfcma/error.hpp"

namespace selfcma {

namespace {

constexpr StopReason kAllReasons[] = {
    StopReason::TargetHit,  StopReason::TolHistFun,      StopReason::TolX,
    StopReason::ConditionCov, StopReason::Stagnation, StopReason::BudgetExhausted,
    StopReason::DegenerateCov,
};

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::TargetHit: return "TargetHit";
    case StopReason::TolHistFun: return "TolHistFun";
    case StopReason::TolX: return "TolX";
    case StopReason::ConditionCov: return "ConditionCov";
    case StopReason::Stagnation: return "Stagnation";
    case StopReason::BudgetExhausted: return "BudgetExhausted";
    case StopReason::DegenerateCov: return "DegenerateCov";
  }
  return "Unknown";
}

std::optional<StopReason> parse_stop_reason(std::string_view s) noexcept {
  for (StopReason r : kAllReasons) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Mode m) noexcept { return m == Mode::Plain ? "plain" : "self"; }

std::optional<Mode> parse_mode(std::string_view s) noexcept {
  if (s == "plain") return Mode::Plain;
  if (s == "self" || s == "self_adaptive") return Mode::SelfAdaptive;
  return std::nullopt;
}

StopConfig StopConfig::defaults(std::int64_t max_evals, double f_opt, double precision, double sigma0) {
  StopConfig c;
  c.max_evals = max_evals;
  c.target_f = f_opt + precision;
  c.tol_x = 1e-12 * sigma0;
  return c;
}

int hist_fun_length(int n, int lambda) { return 10 + ceil_div(30 * n, lambda); }

int default_stagnation_gens(int n, int lambda) { return 100 + ceil_div(100 * n, lambda); }

std::optional<StopReason> check_stop(const CmaState& state, std::span<const double> best_f_history,
                                     const StopConfig& cfg) {
  if (best_f_history.empty()) {
    throw Error(ErrorCode::EmptyInput, "check_stop needs at least one generation of history");
  }
  const int n = state.params.n;
  const int lambda = state.params.lambda;

  if (*std::min_element(best_f_history.begin(), best_f_history.end()) <= cfg.target_f) {
    return StopReason::TargetHit;
  }

  const auto window = static_cast<std::size_t>(hist_fun_length(n, lambda));
  if (best_f_history.size() >= window) {
    const auto tail = best_f_history.last(window);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (*hi - *lo <= cfg.tol_hist_fun) return StopReason::TolHistFun;
  }

  if (state.sigma * std::sqrt(state.cov.matrix().diagonal().maxCoeff()) <= cfg.tol_x) {
    return StopReason::TolX;
  }

  if (state.eigen.condition() > cfg.max_cond) return StopReason::ConditionCov;

  const auto stagnation =
      static_cast<std::size_t>(cfg.stagnation_gens.value_or(default_stagnation_gens(n, lambda)));
  if (best_f_history.size() > stagnation) {
    const auto head = best_f_history.first(best_f_history.size() - stagnation);
    const auto tail = best_f_history.last(stagnation);
    if (*std::min_element(tail.begin(), tail.end()) >= *std::min_element(head.begin(), head.end())) {
      return StopReason::Stagnation;
    }
  }

  if (state.eval_count >= cfg.max_evals) return StopReason::BudgetExhausted;
  return std::nullopt;
}

RestartReport ipop_run(const Problem& problem, Mode mode, int lambda0, const IpopConfig& cfg,
                       RngStream& rng, const GenerationObserver& observer) {
  if (lambda0 < 2) throw Error(ErrorCode::InvalidLambda, "lambda0 must be >= 2");
  if (cfg.stop.max_evals <= 0) throw Error(ErrorCode::InvalidRange, "max_evals must be positive");

  RestartReport report;
  report.best_f = std::numeric_limits<double>::infinity();
  std::int64_t evals = 0;
  const Objective counted = [&](const Vector& x) {
    const double f = problem(x);
    ++evals;
    report.best_f = std::min(report.best_f, f);
    if (!report.evals_to_target && f <= cfg.stop.target_f) report.evals_to_target = evals;
    return f;
  };

  std::int64_t gen_total = 0;
  int lambda = lambda0;
  for (int segment = 0;; ++segment) {
    CmaState init = CmaState::initial(default_params(problem.n, lambda),
                                      uniform_vector(rng, problem.n, cfg.init_lo, cfg.init_hi),
                                      cfg.sigma0);
    init.eval_count = evals;

    std::optional<SelfCmaDriver> driver;
    CmaState plain;
    if (mode == Mode::SelfAdaptive) {
      driver = init_self_cma(std::move(init), rng, cfg.self);
    } else {
      plain = std::move(init);
    }
    const auto current = [&]() -> const CmaState& { return driver ? driver->primary : plain; };

    std::vector<double> history;
    std::int64_t seg_gens = 0;
    std::optional<StopReason> reason;
    while (!reason) {
      bool degenerate = false;
      try {
        if (!driver) {
          plain = generation(counted, plain, rng);
        } else if (!driver->prev_primary) {
          driver = warm_up(counted, *driver, rng);
        } else {
          driver = self_step(counted, *driver, rng);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonPositiveDefinite && e.code() != ErrorCode::NonFiniteState) throw;
        degenerate = true;
      }
      ++seg_gens;
      ++gen_total;

      const CmaState& s = current();
      if (degenerate) {
        reason = StopReason::DegenerateCov;
      } else {
        history.push_back(s.last_pop->best_fitness());
        reason = check_stop(s, history, cfg.stop);
      }

      if (observer) {
        GenerationInfo info;
        info.segment = segment;
        info.gen = gen_total;
        info.evals = evals;
        info.best_f = report.best_f;
        info.median_f = s.last_pop ? s.last_pop->median_fitness() : report.best_f;
        info.sigma = s.sigma;
        info.rates = learning_rates(s.params);
        info.stop = reason;
        observer(info);
      }
    }

    report.lambdas.push_back(lambda);
    report.generations.push_back(seg_gens);
    report.stop_reasons.push_back(*reason);
    if (*reason == StopReason::TargetHit || evals >= cfg.stop.max_evals) break;
    ++report.restarts;
    lambda *= 2;
  }
  report.total_evals = evals;
  return report;
}

}  // namespace selfcma
