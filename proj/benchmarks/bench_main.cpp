#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gmwb/cubic_spline.hpp"
#include "gmwb/engine.hpp"
#include "gmwb/fee_solver.hpp"
#include "gmwb/mc_oracle.hpp"
#include "gmwb/quadrature.hpp"

using namespace gmwb;

namespace {

void BM_GaussHermite(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GaussHermite)->Arg(9)->Arg(17)->Arg(64);

void BM_SplineFit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i;
    y[i] = std::sin(0.1 * i);
  }
  CubicSpline s(x, y);
  for (auto _ : state) {
    s.refit(y);
    benchmark::DoNotOptimize(s.second_derivatives().data());
  }
}
BENCHMARK(BM_SplineFit)->Arg(401)->Arg(1601);

void BM_SplineEval(benchmark::State& state) {
  std::vector<double> x(401), y(401);
  for (int i = 0; i < 401; ++i) {
    x[i] = i;
    y[i] = std::sqrt(i + 1.0);
  }
  const CubicSpline s(x, y);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s(t));
    t = t > 400.0 ? 0.0 : t + 0.731;
  }
}
BENCHMARK(BM_SplineEval);

void BM_Price(benchmark::State& state) {
  ContractSpec c;
  c.withdrawals_per_year = 2;
  c.annual_fee_bp = 130.0;
  const MarketParams m = MarketParams::flat(0.05, 0.2, c.num_withdrawals());
  GridOptions o;
  o.w_intervals = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(c, m, o);
  const auto kind = static_cast<StrategyKind>(state.range(1));
  PriceOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(price(c, m, g, kind, opts).price);
}
BENCHMARK(BM_Price)
    ->Args({400, static_cast<int>(StrategyKind::Static)})
    ->Args({400, static_cast<int>(StrategyKind::Optimal)})
    ->Args({400, static_cast<int>(StrategyKind::OptimalWithSurrender)})
    ->Args({800, static_cast<int>(StrategyKind::Optimal)})
    ->Unit(benchmark::kMillisecond);

void BM_FairFee(benchmark::State& state) {
  ContractSpec c;
  const MarketParams m = MarketParams::flat(0.05, 0.2, c.num_withdrawals());
  const GridSpec g = make_grid(c, m);
  for (auto _ : state) benchmark::DoNotOptimize(fair_fee(c, m, g, StrategyKind::Optimal).fee_bp);
}
BENCHMARK(BM_FairFee)->Unit(benchmark::kMillisecond);

void BM_MonteCarloStatic(benchmark::State& state) {
  ContractSpec c;
  c.annual_fee_bp = 100.0;
  const MarketParams m = MarketParams::flat(0.05, 0.2, c.num_withdrawals());
  McConfig cfg;
  cfg.paths = state.range(0);
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mc_price_static(c, m, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloStatic)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
