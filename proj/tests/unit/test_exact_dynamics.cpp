#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fockmarket/exact_dynamics.hpp"
#include "test_support.hpp"

using namespace fockmarket;
using fockmarket::testing::Rng;

namespace {

MatrixOperator price_op(const MarketModel& m) {
  return number_operator(m.space, m.space->mode(ModeKind::kPrice, 0));
}

MarketModel two_trader(const NumberState& st, ModelParams params = {}) {
  return build_two_trader(params, conserved_closed_space(2, st));
}

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(PriceClosedForm, Examples) {
  const auto a = price_supply_closed_form(3, 5, 0.0, 1.0);
  EXPECT_EQ(a.price, 3.0);
  EXPECT_EQ(a.supply, 5.0);
  const auto b = price_supply_closed_form(1, 2, std::numbers::pi / 2, 1.0);
  EXPECT_NEAR(b.price, 2.0, 1e-15);
  EXPECT_NEAR(b.supply, 1.0, 1e-15);
  for (double t = 0; t < 5; t += 0.37) {
    const auto c = price_supply_closed_form(2, 2, t, 0.8);
    EXPECT_EQ(c.price, 2.0);
    const auto d = price_supply_closed_form(4, 1, t, 0.8);
    EXPECT_NEAR(d.price + d.supply, 5.0, 1e-14);
  }
  EXPECT_THROW(price_supply_closed_form(-1, 0, 0.0, 1.0), Error);
}

TEST(Evolver, ConservedTotalsStayConstant) {
  const auto st = two_trader_state(2, 1, 3, 2, 1, 1);
  const auto model = two_trader(st);
  const Evolver ev(model, st);
  const auto times = uniform_grid(5.0, 51);
  for (const auto& c : conserved_operators(model)) {
    const auto series = ev.series(c.op, times, c.name);
    EXPECT_LT(series.max_drift(), 1e-8) << c.name;
  }
  EXPECT_NEAR(ev.series(conserved_operators(model)[0].op, times, "N").value(17), 3.0, 1e-9);
}

TEST(Evolver, InitialTimeGivesStateExpectation) {
  const auto st = two_trader_state(1, 2, 2, 3, 2, 1);
  const auto model = two_trader(st);
  const Evolver ev(model, st);
  const auto pi1 = portfolio_operator(model, 1);
  EXPECT_NEAR(ev.expectation(pi1, 0.0).real(), 1.0 * 1 + 2, 1e-10);
  EXPECT_LT(ev.sector_dim(), model.space->dim());
}

TEST(Evolver, PriceBlockMatchesClosedForm) {
  const auto st = two_trader_state(2, 1, 3, 3, 2, 1);
  for (double lam : {1.0, 0.6}) {
    ModelParams params;
    params.lambda = lam;
    const auto block = price_block_model(two_trader(st, params));
    const Evolver ev(block, st);
    const auto times = uniform_grid(10.0, 201);
    const auto p = ev.series(price_op(block), times, "P");
    for (std::size_t i = 0; i < times.size(); ++i) {
      EXPECT_NEAR(p.value(i), price_supply_closed_form(1, 2, times[i], lam).price, 1e-8);
    }
  }
}

TEST(Evolver, FullTwoTraderPriceDeviatesOnlyWhenTradesHappen) {
  // No shares: the trade term vanishes on the sector and the price follows
  // the closed form exactly.
  const auto idle = two_trader_state(0, 0, 3, 3, 2, 1);
  const Evolver ev_idle(two_trader(idle), idle);
  const auto times = uniform_grid(10.0, 101);
  const auto p_idle = ev_idle.series(price_op(two_trader(idle)), times, "P");
  double worst_idle = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst_idle = std::max(worst_idle,
                          std::abs(p_idle.value(i) - price_supply_closed_form(1, 2, times[i], 1).price));
  }
  EXPECT_LT(worst_idle, 1e-8);

  const auto busy = two_trader_state(2, 1, 3, 4, 2, 1);
  const auto model = two_trader(busy);
  const auto p_busy = Evolver(model, busy).series(price_op(model), times, "P");
  double worst_busy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst_busy = std::max(worst_busy,
                          std::abs(p_busy.value(i) - price_supply_closed_form(1, 2, times[i], 1).price));
  }
  EXPECT_GT(worst_busy, 1e-3);
}

TEST(Evolver, PortfolioDerivativeIsPriceRateTimesShares) {
  const auto st = two_trader_state(2, 1, 3, 2, 2, 1);
  const auto model = two_trader(st);
  const Evolver ev(model, st);
  const auto pi1 = portfolio_operator(model, 1);
  const auto n1 = number_operator(model.space, model.space->mode(ModeKind::kShare, 1));
  const auto pdot = Complex(0, 1) * commutator(model.hamiltonian, price_op(model));
  const auto rhs = pdot * n1;
  const double h = 1e-4;
  for (double t : {0.3, 1.1, 2.5}) {
    const double fd =
        (ev.expectation(pi1, t + h).real() - ev.expectation(pi1, t - h).real()) / (2 * h);
    EXPECT_NEAR(fd, ev.expectation(rhs, t).real(), 1e-6) << t;
  }
}

TEST(Evolver, EffectivePortfolioReducesToShares) {
  const auto st = closed_market_state({2, 1, 0}, {1, 2, 2}, 1, 1);
  ModelParams params;
  params.alpha = {0.2, 0.4, 0.3};
  params.beta = {0.5, 0.1, 0.7};
  const auto model = build_effective_L(params, 1, conserved_closed_space(3, st));
  const Evolver ev(model, st);
  const auto times = uniform_grid(4.0, 41);
  for (double gamma : {0.5, 2.5}) {
    for (int j = 1; j <= 3; ++j) {
      const auto direct = portfolio_series(ev, model, j, times, gamma);
      const auto n = ev.series(number_operator(model.space, model.space->mode(ModeKind::kShare, j)),
                               times, "n");
      const auto reduced = portfolio_from_shares(model, gamma, direct.value(0), n);
      for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_NEAR(direct.value(i), reduced.value(i), 1e-9);
      }
    }
  }
  EXPECT_THROW(portfolio_operator(two_trader(two_trader_state(1, 1, 1, 1, 1, 1)), 1, 2.0), Error);
}

TEST(Evolver, MarginDiscipline) {
  const auto st = two_trader_state(1, 1, 2, 2, 1, 1);
  auto small = build_space({2, 2, 3, 3, 2, 2}, closed_market_labels(2));
  const auto model = build_two_trader(ModelParams{}, small);
  EXPECT_THROW(Evolver(model, st), MarginError);
  EXPECT_THROW(Evolver(model, st, EvolveOptions{2, 1e-12}), MarginError);
  EXPECT_NO_THROW(Evolver(model, st, EvolveOptions{1, 1e-12}));
  EXPECT_THROW(Evolver(model, two_trader_state(5, 0, 0, 0, 0, 0)), StateError);
}

TEST(Evolver, RejectsNonHermitianHamiltonian) {
  const auto st = two_trader_state(1, 0, 1, 0, 0, 1);
  auto model = two_trader(st);
  const auto& s = model.space;
  model.hamiltonian = model.hamiltonian + ladder(s, s->mode(ModeKind::kShare, 1), Ladder::kLower);
  EXPECT_THROW(Evolver(model, st), NumericalError);
}

TEST(Evolver, NonHermitianObservableRejectedByRealSeries) {
  const auto st = two_trader_state(1, 1, 2, 2, 1, 1);
  const auto model = two_trader(st);
  const Evolver ev(model, st);
  const auto& s = model.space;
  const auto x = ladder(s, s->mode(ModeKind::kShare, 1), Ladder::kLower) *
                 ladder(s, s->mode(ModeKind::kShare, 2), Ladder::kRaise) +
                 Complex(0, 1) * number_operator(s, 0);
  const double times[] = {0.0, 0.5};
  EXPECT_THROW(ev.series(x, times, "x"), NumericalError);
}

TEST(HeisenbergSeries, LowOrders) {
  Rng rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    const int n1 = rng.uniform_int(0, 3), n2 = rng.uniform_int(0, 3);
    const int k1 = rng.uniform_int(0, 4), k2 = rng.uniform_int(0, 4);
    const int O = rng.uniform_int(0, 3), M = rng.uniform_int(0, 2);
    const auto st = two_trader_state(n1, n2, k1, k2, O, M);
    const auto model = two_trader(st);
    const auto pi1 = portfolio_operator(model, 1);
    const auto s = heisenberg_series(model, pi1, st, 3);
    EXPECT_NEAR(s.coeffs[0].real(), M * n1 + k1, 1e-12);
    EXPECT_LT(std::abs(s.coeffs[1]), 1e-10);
    EXPECT_NEAR(s.coeffs[2].real(), n1 * (O - M), 1e-10);
    EXPECT_LT(std::abs(s.coeffs[2].imag()), 1e-10);
    EXPECT_LT(std::abs(s.coeffs[3]), 1e-10);
  }
}

TEST(HeisenbergSeries, AgreesWithFullSpaceCommutators) {
  const auto st = two_trader_state(1, 1, 2, 1, 1, 1);
  const auto model = two_trader(st);
  const auto pi1 = portfolio_operator(model, 1);
  const auto series = heisenberg_series(model, pi1, st, 4);
  MatrixOperator nested = pi1;
  Complex ip(1.0);
  double fact = 1.0;
  for (int m = 0; m <= 4; ++m) {
    if (m > 0) {
      nested = commutator(model.hamiltonian, nested);
      ip *= Complex(0, 1);
      fact *= m;
    }
    const Complex full = ip / fact * expectation(st, nested);
    EXPECT_LT(std::abs(full - series.coeffs[static_cast<std::size_t>(m)]), 1e-10) << m;
  }
}

TEST(HeisenbergSeries, TruncationErrorScaling) {
  const auto st = two_trader_state(2, 1, 3, 2, 2, 1);
  const auto model = two_trader(st);
  const Evolver ev(model, st);
  const auto pi1 = portfolio_operator(model, 1);
  const auto series = heisenberg_series(model, pi1, st, 4);
  struct Case {
    int order;
    double t0, t1;
  };
  for (const Case c : {Case{1, 0.001, 0.01}, Case{3, 0.01, 0.05}}) {
    std::vector<double> ts, errs;
    for (int i = 0; i < 10; ++i) {
      const double t = c.t0 * std::pow(c.t1 / c.t0, i / 9.0);
      ts.push_back(t);
      errs.push_back(std::abs(series.evaluate(t, c.order) - ev.expectation(pi1, t)));
    }
    EXPECT_NEAR(loglog_slope(ts, errs), c.order + 1, 0.2) << "order " << c.order;
  }
}

TEST(HeisenbergSeries, OrderZeroAndErrors) {
  const auto st = two_trader_state(1, 0, 2, 0, 1, 1);
  const auto model = two_trader(st);
  const auto n1 = number_operator(model.space, 0);
  const auto s0 = heisenberg_series(model, n1, st, 0);
  ASSERT_EQ(s0.order(), 0);
  EXPECT_EQ(s0.coeffs[0], Complex(1.0));
  EXPECT_THROW(heisenberg_series(model, n1, st, -1), Error);
  auto small = build_space({1, 0, 2, 2, 2, 2}, closed_market_labels(2));
  const auto m2 = build_two_trader(ModelParams{}, small);
  EXPECT_THROW(heisenberg_series(m2, number_operator(small, 0), st, 2), MarginError);
}
