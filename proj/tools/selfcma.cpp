// selfcma: batch runner, plotter and comparison for (self-adaptive) CMA-ES.
//
//   selfcma run --problem sphere --dim 10 --mode self --lambda 100 --runs 15 \
//               --seed 42 --budget 500000 --target 1e-10 --out DIR
//   selfcma plot --in DIR --out FIG.svg
//   selfcma compare --a DIR1 --b DIR2
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "selfcma/error.hpp"
#include "selfcma/experiment.hpp"
#include "selfcma/plot.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Flag name -> config key. Every config-file key is also a flag.
const std::map<std::string, std::string> kRunFlags = {
    {"problem", "problem"},        {"dim", "dim"},
    {"mode", "mode"},              {"lambda", "lambda"},
    {"runs", "runs"},              {"seed", "seed"},
    {"budget", "budget"},          {"target", "target"},
    {"sigma0", "sigma0"},          {"tol-hist-fun", "tol_hist_fun"},
    {"tol-x", "tol_x"},            {"max-cond", "max_cond"},
    {"stagnation-gens", "stagnation_gens"},
    {"lambda-h", "lambda_h"},      {"aux-sigma0", "aux_sigma0"},
    {"aux-objective", "aux_objective"},
    {"out", "out"},
};

int do_run(const std::optional<std::string>& config_file,
           const std::map<std::string, std::optional<std::string>>& flags) {
  selfcma::ExperimentConfig cfg;
  if (config_file) cfg = selfcma::load_config_file(*config_file);
  for (const auto& [flag, value] : flags) {
    if (value) selfcma::apply_setting(cfg, kRunFlags.at(flag), *value);
  }
  selfcma::validate(cfg);
  if (cfg.out_dir.empty()) {
    throw selfcma::Error(selfcma::ErrorCode::ConfigError, "out: an output directory is required");
  }

  const selfcma::ExperimentResult result = selfcma::run_experiment(cfg);
  int hits = 0;
  for (const auto& s : result.summaries) hits += s.evals_to_target ? 1 : 0;
  std::cout << cfg.problem << " n=" << cfg.dim << " mode=" << selfcma::to_string(cfg.mode)
            << " lambda=" << cfg.population() << " runs=" << cfg.runs << " target hit " << hits << "/"
            << cfg.runs << ", median evals-to-target "
            << selfcma::format_double(selfcma::median_evals_to_target(result.summaries)) << "\n"
            << "wrote " << (cfg.out_dir / "summary.csv").string() << "\n";
  return 0;
}

int do_plot(const std::string& in_dir, const std::string& out_file, const std::string& title) {
  const auto logs = selfcma::read_run_logs(in_dir);
  if (logs.empty()) {
    throw selfcma::Error(selfcma::ErrorCode::IoError, "no run_*.csv files in " + in_dir);
  }
  selfcma::emit_plot(selfcma::aggregate_medians(logs), out_file, title);
  std::cout << "median of " << logs.size() << " runs written to " << out_file << "\n";
  return 0;
}

int do_compare(const std::string& a, const std::string& b) {
  const double ma = selfcma::median_evals_to_target(
      selfcma::read_summary_file(std::filesystem::path(a) / "summary.csv"));
  const double mb = selfcma::median_evals_to_target(
      selfcma::read_summary_file(std::filesystem::path(b) / "summary.csv"));
  std::cout << "median evals-to-target a: " << selfcma::format_double(ma) << "\n"
            << "median evals-to-target b: " << selfcma::format_double(mb) << "\n"
            << "ratio a/b: " << selfcma::format_double(ma / mb) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMA-ES with online adaptation of its covariance learning rates"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a seeded batch and write per-run CSV logs");
  std::optional<std::string> config_file;
  run->add_option("--config", config_file, "key=value file; command-line flags take precedence");
  std::map<std::string, std::optional<std::string>> flags;
  for (const auto& [flag, key] : kRunFlags) flags[flag];
  for (auto& [flag, value] : flags) run->add_option("--" + flag, value);

  auto* plot = app.add_subcommand("plot", "Plot the per-generation median of a run directory");
  std::string plot_in, plot_out, plot_title;
  plot->add_option("--in", plot_in, "directory written by 'run'")->required();
  plot->add_option("--out", plot_out, "SVG file")->required();
  plot->add_option("--title", plot_title);

  auto* compare = app.add_subcommand("compare", "Median evals-to-target ratio of two run directories");
  std::string dir_a, dir_b;
  compare->add_option("--a", dir_a)->required();
  compare->add_option("--b", dir_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return do_run(config_file, flags);
    if (*plot) return do_plot(plot_in, plot_out, plot_title);
    return do_compare(dir_a, dir_b);
  } catch (const selfcma::Error& e) {
    std::cerr << "selfcma: " << e.what() << "\n";
    return e.code() == selfcma::ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "selfcma: " << e.what() << "\n";
    return kExitRuntime;
  }
}
