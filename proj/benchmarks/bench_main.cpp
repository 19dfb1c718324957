#include <benchmark/benchmark.h>

#include "fockmarket/exact_dynamics.hpp"
#include "fockmarket/fpl_dynamics.hpp"
#include "fockmarket/market_models.hpp"
#include "fockmarket/price_ladder.hpp"
#include "fockmarket/stochastic_limit.hpp"

using namespace fockmarket;

namespace {

void BM_CashPowerOp(benchmark::State& state) {
  const int cash = static_cast<int>(state.range(0));
  const auto s = build_space({2, 2, cash, cash, 3, 3}, closed_market_labels(2));
  const auto price = s->mode(ModeKind::kPrice, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cash_power_op(s, 2, price, Ladder::kLower));
  }
  state.counters["dim"] = static_cast<double>(s->dim());
}
BENCHMARK(BM_CashPowerOp)->Arg(4)->Arg(8)->Arg(16);

void BM_TwoTraderHamiltonian(benchmark::State& state) {
  const auto st = two_trader_state(2, 1, 3, 4, 2, static_cast<int>(state.range(0)));
  const auto space = conserved_closed_space(2, st);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_two_trader(ModelParams{}, space));
  }
  state.counters["dim"] = static_cast<double>(space->dim());
}
BENCHMARK(BM_TwoTraderHamiltonian)->Arg(1)->Arg(2);

void BM_EvolverSetup(benchmark::State& state) {
  const auto st = two_trader_state(2, 1, 3, 4, 2, static_cast<int>(state.range(0)));
  const auto model = build_two_trader(ModelParams{}, conserved_closed_space(2, st));
  for (auto _ : state) {
    const Evolver ev(model, st);
    benchmark::DoNotOptimize(ev.sector_dim());
  }
}
BENCHMARK(BM_EvolverSetup)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_HeisenbergSeries(benchmark::State& state) {
  const auto st = two_trader_state(2, 1, 3, 2, 1, 2);
  const auto model = build_two_trader(ModelParams{}, conserved_closed_space(2, st));
  const auto pi = portfolio_operator(model, 1);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(heisenberg_series(model, pi, st, order));
  }
}
BENCHMARK(BM_HeisenbergSeries)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_StationarityVerdict(benchmark::State& state) {
  ModelParams p;
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  p.Omega_A.assign(m, 2.0);
  p.Omega_C.assign(m, 2.0);
  p.Omega_O.assign(m, 2.0);
  p.Omega_O[0] = p.omega_p;
  p.f.assign(m, Complex(1.0));
  p.g.assign(m, Complex(1.0));
  const ReservoirState r{std::vector<int>(m, 1), std::vector<int>(m, 2), std::vector<int>(m, 1)};
  const auto sys = system_operators(3, 8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationarity_verdict(p, r, 2, sys));
  }
}
BENCHMARK(BM_StationarityVerdict)->Arg(1)->Arg(16)->Arg(256);

void BM_FplTrajectory(benchmark::State& state) {
  FplParams p;
  p.w1 = 1.0;
  p.w2 = 10.0;
  const auto times = uniform_grid(10.0, 101);
  const auto method = state.range(0) == 0 ? Quadrature::kAdaptive : Quadrature::kSimpson;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trajectory(p, times, method));
  }
}
BENCHMARK(BM_FplTrajectory)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
