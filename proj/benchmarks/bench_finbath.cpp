#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "finbath/centralspin.hpp"
#include "finbath/rtn.hpp"
#include "finbath/scenario.hpp"
#include "finbath/tlsmap.hpp"

using namespace finbath;

namespace {

Mat2 fig1_state() { return scenario::ScenarioConfig{}.rho0(); }

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[k] = t_max * k / (n - 1);
  return t;
}

centralspin::CentralSpinParams bath(int n) {
  centralspin::CentralSpinParams p;
  p.n_bath = n;
  return p;
}

}  // namespace

// Closed-form propagators cost O(N) per time point.
static void BM_Propagators(benchmark::State& state) {
  const centralspin::CentralSpinModel model(bath(int(state.range(0))));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.propagators(t));
    t += 1e-3;
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Propagators)->RangeMultiplier(4)->Range(4, 4096)->Complexity(benchmark::oN);

static void BM_BruteForceSetup(benchmark::State& state) {
  const auto p = bath(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(centralspin::BruteForceEvolver(p));
}
BENCHMARK(BM_BruteForceSetup)->RangeMultiplier(2)->Range(2, 64);

static void BM_BruteForceState(benchmark::State& state) {
  const centralspin::BruteForceEvolver dense(bath(int(state.range(0))));
  const Mat2 rho0 = fig1_state();
  for (auto _ : state) benchmark::DoNotOptimize(dense.state(rho0, 2.7));
}
BENCHMARK(BM_BruteForceState)->RangeMultiplier(2)->Range(2, 64);

// Map -> generator -> Choi -> pseudo-Kraus -> canonical form at one time.
static void BM_GenericPipeline(benchmark::State& state) {
  const auto model = std::make_shared<const centralspin::CentralSpinModel>(bath(50));
  const auto source = centralspin::map_source(model);
  for (auto _ : state) benchmark::DoNotOptimize(tlsmap::canonical_master_equation(source, 1.9));
}
BENCHMARK(BM_GenericPipeline);

static void BM_ClosedFormRates(benchmark::State& state) {
  const centralspin::CentralSpinModel model(bath(50));
  for (auto _ : state) {
    benchmark::DoNotOptimize(centralspin::canonical_decomposition_cs(centralspin::rates(model, 1.9)));
  }
}
BENCHMARK(BM_ClosedFormRates);

static void BM_Rk4Propagation(benchmark::State& state) {
  const centralspin::CentralSpinModel model(bath(50));
  const auto t = grid(0.5, 501);
  const Mat2 rho0 = fig1_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlsmap::propagate_master_equation(
        [&](double s) {
          return centralspin::canonical_decomposition_cs(centralspin::rates(model, s));
        },
        rho0, t));
  }
}
BENCHMARK(BM_Rk4Propagation)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
  const rtn::RtnParams p;
  const auto t = grid(10.0, 50);
  rtn::MonteCarloOptions opt;
  opt.seed = 1;
  opt.trajectories = std::size_t(state.range(0));
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rtn::monte_carlo_lambda(p, t, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
