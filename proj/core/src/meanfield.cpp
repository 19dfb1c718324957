#include "fockmarket/meanfield.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace fockmarket {

namespace odeint = boost::numeric::odeint;

double MeanFieldParams::omega() const {
  const double d = phi - nu;
  return std::sqrt(d * d + 16.0 * std::norm(x0));
}

void MeanFieldParams::validate() const {
  if (!(n0 >= 0.0) || !(k0 >= 0.0)) {
    throw Error(fmt::format("mean occupations must be >= 0 (n0={}, k0={})", n0, k0));
  }
  const double all[] = {phi, nu, x0.real(), x0.imag(), gamma_share, x_initial.real(),
                        x_initial.imag()};
  for (double v : all) {
    if (!std::isfinite(v)) throw Error("mean-field parameters must be finite");
  }
}

double meanfield_n(double t, const MeanFieldParams& p) {
  p.validate();
  const double w = p.omega();
  if (w == 0.0) throw DegenerateParameters("omega = 0: phi == nu and x0 == 0");
  const double d = p.phi - p.nu;
  const double c = std::cos(w * t);
  const double x2 = std::norm(p.x0);
  return (p.n0 * d * d - 8.0 * x2 * (p.k0 * (c - 1.0) - p.n0 * (c + 1.0))) / (w * w);
}

double meanfield_portfolio(double t, const MeanFieldParams& p) {
  const double pi0 = p.gamma_share * p.n0 + p.k0;
  return pi0 + (p.gamma_share - 1.0) * (meanfield_n(t, p) - p.n0);
}

double meanfield_envelope(const MeanFieldParams& p) {
  const double w = p.omega();
  if (w == 0.0) throw DegenerateParameters("omega = 0: phi == nu and x0 == 0");
  return 16.0 * std::norm(p.x0) * (p.n0 + p.k0) / (w * w);
}

TimeSeries meanfield_series(const MeanFieldParams& p, std::span<const double> times) {
  TimeSeries out("n");
  for (double t : times) out.append(t, meanfield_n(t, p));
  return out;
}

MeanFieldSolution integrate_meanfield_ode(const MeanFieldParams& p,
                                          std::span<const double> times) {
  p.validate();
  using State = std::array<Complex, 2>;  // (x, n)
  const Complex i(0.0, 1.0);
  const double q = p.n0 + p.k0;
  auto rhs = [&](const State& s, State& ds, double t) {
    const Complex xinf = p.x0 * std::polar(1.0, p.nu * t);
    ds[0] = i * p.phi * s[0] + 2.0 * i * xinf * (2.0 * s[1] - q);
    ds[1] = 2.0 * i * (s[0] * std::conj(xinf) - xinf * std::conj(s[0]));
  };

  MeanFieldSolution out{TimeSeries("n"), {}, {}};
  if (times.empty()) return out;
  State s{p.x_initial, Complex(p.n0, 0.0)};
  auto observe = [&](const State& st, double t) {
    out.n.append(t, st[1].real());
    out.n_imag.push_back(st[1].imag());
    out.x.push_back(st[0]);
  };
  auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<State>());
  std::vector<double> grid(times.begin(), times.end());
  try {
    odeint::integrate_times(stepper, rhs, s, grid.begin(), grid.end(), 1e-3, observe,
                            odeint::max_step_checker(1'000'000));
  } catch (const odeint::step_adjustment_error& e) {
    throw NumericalError(fmt::format("mean-field ODE step size underflow: {}", e.what()));
  } catch (const odeint::no_progress_error& e) {
    throw NumericalError(fmt::format("mean-field ODE made no progress: {}", e.what()));
  }
  return out;
}

MatrixOperator x_operator(const SpacePtr& space, int trader) {
  const std::size_t a = space->mode(ModeKind::kShare, trader);
  const std::size_t c = space->mode(ModeKind::kCash, trader);
  return ladder(space, a, Ladder::kLower) * ladder(space, c, Ladder::kRaise);
}

XAlgebra x_algebra(const SpacePtr& space, int i, int j) {
  const MatrixOperator xi = x_operator(space, i);
  const MatrixOperator xj = x_operator(space, j);
  const MatrixOperator nj = number_operator(space, space->mode(ModeKind::kShare, j));
  const MatrixOperator kj = number_operator(space, space->mode(ModeKind::kCash, j));
  return {commutator(xi, xj.adjoint()), commutator(xi, nj), commutator(xi, kj)};
}

}  // namespace fockmarket
