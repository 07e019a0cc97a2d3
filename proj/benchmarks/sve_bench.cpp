#include <benchmark/benchmark.h>

#include <cmath>

#include "sve/cycles.hpp"
#include "sve/edgeworth.hpp"
#include "sve/ergodic.hpp"
#include "sve/mc.hpp"
#include "sve/pricer.hpp"
#include "sve/rng.hpp"

namespace {

void BM_measure_heston(benchmark::State& state) {
  const auto spec = sve::heston_log({1.0, 0.04, 0.5, 1.0, -0.5});
  for (auto _ : state) benchmark::DoNotOptimize(sve::build_ergodic_measure(spec).epsilon);
}
BENCHMARK(BM_measure_heston)->Unit(benchmark::kMillisecond);

void BM_measure_ou(benchmark::State& state) {
  const auto spec = sve::fouque_ou({});
  for (auto _ : state) benchmark::DoNotOptimize(sve::build_ergodic_measure(spec).epsilon);
}
BENCHMARK(BM_measure_ou)->Unit(benchmark::kMillisecond);

void BM_price_corrected_put(benchmark::State& state) {
  const auto spec = sve::heston_log({1.0, 0.04, 0.5, 0.1, -0.5});
  const auto m = sve::build_ergodic_measure(spec);
  sve::MarketSpec market;
  const auto put = sve::Payoff::put(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sve::price_corrected(put, m, spec, market).price_corrected);
}
BENCHMARK(BM_price_corrected_put)->Unit(benchmark::kMicrosecond);

void BM_put_closed_form(benchmark::State& state) {
  double k = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sve::put_closed_form(k, -0.02, 0.04, 0.0, 1.0));
    k = k < 1.1 ? k + 1e-6 : 0.9;
  }
}
BENCHMARK(BM_put_closed_form);

void BM_implied_vol(benchmark::State& state) {
  const double p = sve::bs_put(1.05, 0.04, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sve::implied_vol(p, 1.05, 1.0, 0.0, 1.0, false));
}
BENCHMARK(BM_implied_vol);

void BM_philox_normal(benchmark::State& state) {
  sve::PathStream rng(42, 0, sve::kNormalStream);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_philox_normal);

void BM_edgeworth_cdf(benchmark::State& state) {
  const sve::EdgeworthDensity q{1.05, 0.1, -1.9, 100.0};
  double z = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(q.cdf(z));
    z = z < 3.0 ? z + 1e-3 : -3.0;
  }
}
BENCHMARK(BM_edgeworth_cdf);

void BM_mc_heston_put(benchmark::State& state) {
  const auto spec = sve::heston_log({8.0, 0.25, 0.5, 0.2, -0.5});
  sve::MarketSpec market;
  market.maturity = 0.1;
  sve::McConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  cfg.dt = 4e-6;
  cfg.antithetic = true;
  cfg.threads = 1;
  cfg.scheme = sve::default_scheme(spec);
  const auto put = sve::Payoff::put(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sve::price_mc(put, spec, market, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 25000);
}
BENCHMARK(BM_mc_heston_put)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_extract_cycles(benchmark::State& state) {
  const auto spec = sve::fouque_ou({});
  const auto m = sve::build_ergodic_measure(spec);
  sve::CycleSetup s;
  s.x0 = -0.3;
  s.x1 = 0.3;
  s.start = -0.3;
  s.horizon = 200.0;
  s.epsilon = m.epsilon;
  sve::McConfig cfg;
  cfg.n_paths = 4;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sve::extract_cycles(spec, s, cfg).size());
}
BENCHMARK(BM_extract_cycles)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
