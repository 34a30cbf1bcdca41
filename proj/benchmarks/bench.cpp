#include <benchmark/benchmark.h>

#include "selfcma/cmaes.hpp"
#include "selfcma/linalg.hpp"
#include "selfcma/rng.hpp"
#include "selfcma/self_adapt.hpp"

using namespace selfcma;

namespace {

const Objective kEllipsoid = [](const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(1e3, static_cast<double>(i) / (x.size() - 1)) * x(i) * x(i);
  return s;
};

void BM_SymEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1);
  const Matrix a = Matrix::NullaryExpr(n, n, [&] { return rng.standard_normal(); });
  const SymMatrix c(a * a.transpose() + Matrix::Identity(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(c));
}
BENCHMARK(BM_SymEigen)->Arg(10)->Arg(20)->Arg(40);

void BM_UpdateDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(2);
  const CmaState s = CmaState::initial(default_params(n, 100), Vector::Ones(n), 1.0);
  auto xs = sample_population(s, rng);
  std::vector<double> fs;
  for (const Vector& x : xs) fs.push_back(kEllipsoid(x));
  const auto pop = EvaluatedPopulation::from(std::move(xs), std::move(fs));
  for (auto _ : state) benchmark::DoNotOptimize(update_distribution(s, pop));
}
BENCHMARK(BM_UpdateDistribution)->Arg(10)->Arg(20);

void BM_HObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(3);
  const CmaState prev = CmaState::initial(default_params(n, 100), Vector::Ones(n), 1.0);
  const CmaState cur = generation(kEllipsoid, prev, rng);
  const CmaState next = generation(kEllipsoid, cur, rng);
  const SelectionWeights sel = SelectionWeights::defaults(100);
  const HyperVector cand{0.05, 0.4, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(h_objective(cand, prev, *cur.last_pop, *next.last_pop, sel));
}
BENCHMARK(BM_HObjective)->Arg(10)->Arg(20);

void BM_SelfStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(4);
  SelfCmaDriver d = warm_up(kEllipsoid, init_self_cma(CmaState::initial(default_params(n, 100), Vector::Ones(n), 1.0), rng), rng);
  for (auto _ : state) d = self_step(kEllipsoid, std::move(d), rng);
}
BENCHMARK(BM_SelfStep)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
