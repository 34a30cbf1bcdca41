#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfcma/restart.hpp"
#include "selfcma/run_log.hpp"
#include "selfcma/self_adapt.hpp"

namespace selfcma {

struct ExperimentConfig {
  std::string problem = "sphere";
  int dim = 10;
  Mode mode = Mode::SelfAdaptive;
  std::optional<int> lambda;  // default_lambda(dim) when unset
  int runs = 15;
  std::uint64_t master_seed = 42;
  std::int64_t budget = 500000;
  double target = 1e-10;  // precision above f_opt
  double sigma0 = 2.0;

  // Stop-criterion overrides; unset keeps the StopConfig defaults.
  std::optional<double> tol_hist_fun;
  std::optional<double> tol_x;
  std::optional<double> max_cond;
  std::optional<int> stagnation_gens;

  int lambda_h = 20;
  double aux_sigma0 = 0.2;
  AuxObjective aux_objective = AuxObjective::RankAgreement;

  std::filesystem::path out_dir;  // empty: nothing written

  int population() const;
};

/// Applies one `key=value` setting. Keys match the long CLI flags
/// (problem, dim, mode, lambda, runs, seed, budget, target, sigma0,
/// tol_hist_fun, tol_x, max_cond, stagnation_gens, lambda_h, aux_sigma0,
/// aux_objective, out). Throws Error(ConfigError) naming the key.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key=value` lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_key_values(std::istream& in);
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Throws Error(ConfigError) with the offending field.
void validate(const ExperimentConfig& cfg);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  std::int64_t evals = 0;
  double best_f = 0.0;
  std::optional<std::int64_t> evals_to_target;
  int restarts = 0;
  int final_lambda = 0;
  std::vector<std::string> stop_reasons;

  bool operator==(const RunSummary&) const = default;
};

struct RunResult {
  RunLog log;
  RunSummary summary;
};

struct ExperimentResult {
  std::vector<RunLog> logs;
  std::vector<RunSummary> summaries;
};

/// Run `index` of the batch, seeded with derive_seed(master_seed, index).
RunResult run_single(const ExperimentConfig& cfg, int index);

/// All runs, at most `threads` at a time (0 = thread_limit()). Results do
/// not depend on the thread count. With an out_dir, writes run_NNN.csv per
/// run and summary.csv, each atomically.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 0);

/// SELFCMA_THREADS if set and positive, else the hardware concurrency.
int thread_limit();

std::string run_file_name(int index, int runs);

inline constexpr std::string_view kSummaryHeader =
    "run,seed,evals,best_f,evals_to_target,restarts,final_lambda,stop_reasons";
std::string summary_to_csv(const std::vector<RunSummary>& rows);
std::vector<RunSummary> parse_summary_csv(std::istream& in);
std::vector<RunSummary> read_summary_file(const std::filesystem::path& path);

/// Lower median of evals-to-target; runs that missed the target count as +∞.
double median_evals_to_target(const std::vector<RunSummary>& rows);

/// Every run_*.csv in `dir`, in file-name order.
std::vector<RunLog> read_run_logs(const std::filesystem::path& dir);

}  // namespace selfcma
