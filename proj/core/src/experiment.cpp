#include "selfcma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "selfcma/benchfns.hpp"
#include "selfcma/error.hpp"

namespace selfcma {

namespace {

[[noreturn]] void config_error(std::string_view key, const std::string& what) {
  throw Error(ErrorCode::ConfigError, std::string(key) + ": " + what);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T v{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    config_error(key, "cannot parse '" + std::string(value) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

int ExperimentConfig::population() const { return lambda.value_or(default_lambda(dim)); }

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "problem") {
    cfg.problem = std::string(value);
  } else if (key == "dim") {
    cfg.dim = parse_number<int>(key, value);
  } else if (key == "mode") {
    const auto m = parse_mode(value);
    if (!m) config_error(key, "expected 'plain' or 'self', got '" + std::string(value) + "'");
    cfg.mode = *m;
  } else if (key == "lambda") {
    cfg.lambda = parse_number<int>(key, value);
  } else if (key == "runs") {
    cfg.runs = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "budget") {
    cfg.budget = parse_number<std::int64_t>(key, value);
  } else if (key == "target") {
    cfg.target = parse_number<double>(key, value);
  } else if (key == "sigma0") {
    cfg.sigma0 = parse_number<double>(key, value);
  } else if (key == "tol_hist_fun") {
    cfg.tol_hist_fun = parse_number<double>(key, value);
  } else if (key == "tol_x") {
    cfg.tol_x = parse_number<double>(key, value);
  } else if (key == "max_cond") {
    cfg.max_cond = parse_number<double>(key, value);
  } else if (key == "stagnation_gens") {
    cfg.stagnation_gens = parse_number<int>(key, value);
  } else if (key == "lambda_h") {
    cfg.lambda_h = parse_number<int>(key, value);
  } else if (key == "aux_sigma0") {
    cfg.aux_sigma0 = parse_number<double>(key, value);
  } else if (key == "aux_objective") {
    if (value == "rank") {
      cfg.aux_objective = AuxObjective::RankAgreement;
    } else if (value == "loglik") {
      cfg.aux_objective = AuxObjective::LogLikelihood;
    } else {
      config_error(key, "expected 'rank' or 'loglik', got '" + std::string(value) + "'");
    }
  } else if (key == "out") {
    cfg.out_dir = std::string(value);
  } else {
    config_error(key, "unknown key");
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
    }
    kv[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  return kv;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "config: cannot open " + path.string());
  for (const auto& [k, v] : parse_key_values(in)) apply_setting(base, k, v);
  return base;
}

void validate(const ExperimentConfig& cfg) {
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), cfg.problem) == names.end()) {
    config_error("problem", "unknown problem '" + cfg.problem + "'");
  }
  const int min_dim = cfg.problem == "sphere" ? 1 : 2;
  if (cfg.dim < min_dim) config_error("dim", "must be >= " + std::to_string(min_dim));
  if (cfg.lambda && *cfg.lambda < 2) config_error("lambda", "must be >= 2");
  if (cfg.runs < 1) config_error("runs", "must be >= 1");
  if (cfg.budget <= 0) config_error("budget", "must be > 0");
  if (!(cfg.target > 0.0)) config_error("target", "must be > 0");
  if (!(cfg.sigma0 > 0.0)) config_error("sigma0", "must be > 0");
  if (cfg.tol_hist_fun && !(*cfg.tol_hist_fun > 0.0)) config_error("tol_hist_fun", "must be > 0");
  if (cfg.tol_x && !(*cfg.tol_x > 0.0)) config_error("tol_x", "must be > 0");
  if (cfg.max_cond && !(*cfg.max_cond > 1.0)) config_error("max_cond", "must be > 1");
  if (cfg.stagnation_gens && *cfg.stagnation_gens < 1) config_error("stagnation_gens", "must be >= 1");
  if (cfg.lambda_h < 2) config_error("lambda_h", "must be >= 2");
  if (!(cfg.aux_sigma0 > 0.0)) config_error("aux_sigma0", "must be > 0");
}

RunResult run_single(const ExperimentConfig& cfg, int index) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  RngStream rng(seed);
  const Problem problem = make_problem(cfg.problem, cfg.dim, rng);

  IpopConfig ipop;
  ipop.sigma0 = cfg.sigma0;
  ipop.stop = StopConfig::defaults(cfg.budget, problem.f_opt, cfg.target, cfg.sigma0);
  if (cfg.tol_hist_fun) ipop.stop.tol_hist_fun = *cfg.tol_hist_fun;
  if (cfg.tol_x) ipop.stop.tol_x = *cfg.tol_x;
  if (cfg.max_cond) ipop.stop.max_cond = *cfg.max_cond;
  ipop.stop.stagnation_gens = cfg.stagnation_gens;
  ipop.self.lambda_h = cfg.lambda_h;
  ipop.self.aux_sigma0 = cfg.aux_sigma0;
  ipop.self.objective = cfg.aux_objective;

  RunResult result;
  const auto observer = [&](const GenerationInfo& g) {
    result.log.records.push_back({g.gen, g.evals, g.best_f, g.median_f, g.sigma, g.rates.c_1,
                                  g.rates.c_mu, g.rates.c_c,
                                  g.stop ? std::string(to_string(*g.stop)) : std::string()});
  };
  const RestartReport report = ipop_run(problem, cfg.mode, cfg.population(), ipop, rng, observer);

  RunSummary& s = result.summary;
  s.run = index;
  s.seed = seed;
  s.evals = report.total_evals;
  s.best_f = report.best_f;
  s.evals_to_target = report.evals_to_target;
  s.restarts = report.restarts;
  s.final_lambda = report.lambdas.back();
  for (StopReason r : report.stop_reasons) s.stop_reasons.emplace_back(to_string(r));
  return result;
}

int thread_limit() {
  if (const char* env = std::getenv("SELFCMA_THREADS")) {
    int v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc{} && v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string run_file_name(int index, int runs) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(std::max(runs - 1, 0)).size()));
  std::string digits = std::to_string(index);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return "run_" + digits + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  validate(cfg);
  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.out_dir.string() + ": " + ec.message());
  }

  std::vector<RunResult> results(static_cast<std::size_t>(cfg.runs));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&] {
    for (int i = next++; i < cfg.runs; i = next++) {
      try {
        RunResult r = run_single(cfg, i);
        if (!cfg.out_dir.empty()) {
          write_file_atomic(cfg.out_dir / run_file_name(i, cfg.runs), to_csv(r.log));
        }
        results[static_cast<std::size_t>(i)] = std::move(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int n_threads = std::clamp(threads > 0 ? threads : thread_limit(), 1, cfg.runs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentResult out;
  for (RunResult& r : results) {
    out.logs.push_back(std::move(r.log));
    out.summaries.push_back(std::move(r.summary));
  }
  if (!cfg.out_dir.empty()) {
    write_file_atomic(cfg.out_dir / "summary.csv", summary_to_csv(out.summaries));
  }
  return out;
}

std::string summary_to_csv(const std::vector<RunSummary>& rows) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const RunSummary& r : rows) {
    out << r.run << ',' << r.seed << ',' << r.evals << ',' << format_double(r.best_f) << ',';
    if (r.evals_to_target) out << *r.evals_to_target;
    out << ',' << r.restarts << ',' << r.final_lambda << ',';
    for (std::size_t i = 0; i < r.stop_reasons.size(); ++i) {
      if (i) out << ';';
      out << r.stop_reasons[i];
    }
    out << '\n';
  }
  return out.str();
}

std::vector<RunSummary> parse_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw Error(ErrorCode::IoError, "summary header mismatch: '" + line + "'");
  }
  const auto num = [](std::string_view key, std::string_view v) {
    try {
      return parse_number<std::int64_t>(key, v);
    } catch (const Error& e) {
      throw Error(ErrorCode::IoError, e.what());
    }
  };
  std::vector<RunSummary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw Error(ErrorCode::IoError, "summary row with " + std::to_string(f.size()) + " fields");
    RunSummary r;
    r.run = static_cast<int>(num("run", f[0]));
    try {
      r.seed = parse_number<std::uint64_t>("seed", f[1]);
    } catch (const Error& e) {
      throw Error(ErrorCode::IoError, e.what());
    }
    r.evals = num("evals", f[2]);
    r.best_f = parse_double(f[3]);
    if (!f[4].empty()) r.evals_to_target = num("evals_to_target", f[4]);
    r.restarts = static_cast<int>(num("restarts", f[5]));
    r.final_lambda = static_cast<int>(num("final_lambda", f[6]));
    std::stringstream reasons(f[7]);
    std::string reason;
    while (std::getline(reasons, reason, ';')) r.stop_reasons.push_back(reason);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RunSummary> read_summary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_summary_csv(in);
}

double median_evals_to_target(const std::vector<RunSummary>& rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const RunSummary& r : rows) {
    v.push_back(r.evals_to_target ? static_cast<double>(*r.evals_to_target)
                                  : std::numeric_limits<double>::infinity());
  }
  return lower_median(std::move(v));
}

std::vector<RunLog> read_run_logs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("run_") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<RunLog> logs;
  for (const auto& f : files) logs.push_back(read_csv_file(f));
  return logs;
}

}  // namespace selfcma
