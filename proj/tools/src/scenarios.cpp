#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "fockmarket/exact_dynamics.hpp"
#include "fockmarket/fpl_dynamics.hpp"
#include "fockmarket/meanfield.hpp"
#include "fockmarket/stochastic_limit.hpp"
#include "fockmarket/time_series.hpp"
#include "fockmarket_cli/run.hpp"

namespace fockmarket::cli {

namespace {

using Report = std::map<std::string, std::string>;

std::string render(const Report& report) {
  std::string out;
  for (const auto& [key, value] : report) out += fmt::format("{}={}\n", key, value);
  return out;
}

void add_series(OutputFiles& files, const TimeSeries& series) {
  files[series.label() + ".csv"] = series.to_csv();
}

double drift(const Evolver& ev, const MatrixOperator& op, std::span<const double> times) {
  const auto values = ev.expectations(op, times);
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, std::abs(v - values.front()));
  return worst;
}

// Shared by the two closed models.
void closed_outputs(OutputFiles& files, Report& report, const MarketModel& model,
                    const Evolver& ev, std::span<const double> times, std::optional<double> gamma,
                    bool conserved_check) {
  const auto& s = model.space;
  add_series(files, ev.series(number_operator(s, s->mode(ModeKind::kPrice, 0)), times, "price"));
  add_series(files,
             ev.series(number_operator(s, s->mode(ModeKind::kSupply, 0)), times, "supply"));
  for (int j = 1; j <= static_cast<int>(model.traders); ++j) {
    add_series(files, ev.series(number_operator(s, s->mode(ModeKind::kShare, j)), times,
                                fmt::format("shares_{}", j)));
    add_series(files, ev.series(number_operator(s, s->mode(ModeKind::kCash, j)), times,
                                fmt::format("cash_{}", j)));
    add_series(files, ev.series(portfolio_operator(model, j, gamma), times,
                                fmt::format("portfolio_{}", j)));
  }
  report["sector_dim"] = std::to_string(ev.sector_dim());
  if (!conserved_check) return;
  bool ok = true;
  for (const auto& c : conserved_operators(model)) {
    const double d = drift(ev, c.op, times);
    ok = ok && d < 1e-8;
    report["drift_" + c.name] = format_number(d);
  }
  report["conserved_ok"] = ok ? "true" : "false";
  for (int j = 1; j <= static_cast<int>(model.traders); ++j) {
    const auto c = commutator(model.hamiltonian, price_weighted_portfolio(model, j));
    report[fmt::format("commutator_norm_price_weighted_{}", j)] =
        format_number(max_abs_on_interior(c, 1));
  }
}

OutputFiles run_two_trader(const ScenarioConfig& c, const TwoTraderSettings& s) {
  const auto model = build_two_trader(s.params, conserved_closed_space(2, s.state));
  const Evolver ev(model, s.state);
  OutputFiles files;
  Report report;
  closed_outputs(files, report, model, ev, c.grid.times(), std::nullopt, s.conserved_check);
  files["report.txt"] = render(report);
  return files;
}

OutputFiles run_effective(const ScenarioConfig& c, const EffectiveSettings& s) {
  const NumberState state = closed_market_state(s.shares, s.cash, s.supply, s.price);
  const auto model =
      build_effective_L(s.params, s.frozen_price, conserved_closed_space(s.shares.size(), state));
  const Evolver ev(model, state);
  OutputFiles files;
  Report report;
  closed_outputs(files, report, model, ev, c.grid.times(), s.gamma, s.conserved_check);
  files["report.txt"] = render(report);
  return files;
}

OutputFiles run_meanfield(const ScenarioConfig& c, const MeanFieldSettings& s) {
  const auto times = c.grid.times();
  OutputFiles files;
  const TimeSeries n = meanfield_series(s.params, times);
  add_series(files, n);
  TimeSeries portfolio("portfolio");
  for (double t : times) portfolio.append(t, meanfield_portfolio(t, s.params));
  add_series(files, portfolio);
  Report report;
  report["omega"] = format_number(s.params.omega());
  report["envelope"] = format_number(meanfield_envelope(s.params));
  if (s.ode) {
    const auto sol = integrate_meanfield_ode(s.params, times);
    files["n_ode.csv"] = TimeSeries("n_ode", {times.begin(), times.end()},
                                    {sol.n.values().begin(), sol.n.values().end()})
                             .to_csv();
    double diff = 0.0, imag = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      diff = std::max(diff, std::abs(sol.n.value(i) - n.value(i)));
      imag = std::max(imag, std::abs(sol.n_imag[i]));
    }
    report["ode_max_abs_diff"] = format_number(diff);
    report["ode_max_imag"] = format_number(imag);
  }
  files["report.txt"] = render(report);
  return files;
}

OutputFiles run_stochastic(const StochasticSettings& s) {
  const auto sys = system_operators(s.share_cutoff, s.cash_cutoff, s.price_cutoff);
  const auto verdict = stationarity_verdict(s.params, s.reservoir, s.price, sys, s.delta);
  const Complex second = second_order_term(verdict.gammas, s.n, s.k, s.price);
  std::string report = verdict.to_report();
  report += fmt::format("second_order_im={}\nsecond_order_re={}\n", format_number(second.imag()),
                        format_number(second.real()));
  return {{"verdict.txt", report}};
}

OutputFiles run_fpl(const ScenarioConfig& c, const FplSettings& s) {
  return {{"fpl.csv", trajectory(s.params, c.grid.times(), s.method).to_csv()}};
}

}  // namespace

OutputFiles run_scenario(const ScenarioConfig& config) {
  return std::visit(
      [&](const auto& s) -> OutputFiles {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TwoTraderSettings>) {
          return run_two_trader(config, s);
        } else if constexpr (std::is_same_v<T, EffectiveSettings>) {
          return run_effective(config, s);
        } else if constexpr (std::is_same_v<T, MeanFieldSettings>) {
          return run_meanfield(config, s);
        } else if constexpr (std::is_same_v<T, StochasticSettings>) {
          return run_stochastic(s);
        } else {
          return run_fpl(config, s);
        }
      },
      config.settings);
}

}  // namespace fockmarket::cli
