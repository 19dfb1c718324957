#pragma once

// Mean-field limit of the effective model: the X_i = a_i c_i^dagger
// operators, the classical system for (x_l, n_l) driven by a constant
// background X_inf, and its closed-form share trajectory.

#include <complex>
#include <span>
#include <vector>

#include "fockmarket/fock_space.hpp"
#include "fockmarket/time_series.hpp"

namespace fockmarket {

struct MeanFieldParams {
  double phi = 0.0;  // beta_l - alpha_l
  double nu = 0.0;   // phase rate of the background, X_inf(t) = x0 e^{i nu t}
  Complex x0{0.0, 0.0};
  double n0 = 0.0;
  double k0 = 0.0;
  double gamma_share = 1.0;
  Complex x_initial{0.0, 0.0};  // x_l(0) for the ODE; the closed form assumes 0

  // sqrt((phi - nu)^2 + 16 |x0|^2)
  double omega() const;
  // Throws Error on negative occupations or non-finite inputs.
  void validate() const;
};

// Throws DegenerateParameters when omega() == 0.
double meanfield_n(double t, const MeanFieldParams& p);
// Pi(0) + (gamma - 1)(n(t) - n0) with Pi(0) = gamma n0 + k0.
double meanfield_portfolio(double t, const MeanFieldParams& p);
// 16 |x0|^2 (n0 + k0) / omega^2, a bound on |n(t) - n0|.
double meanfield_envelope(const MeanFieldParams& p);

TimeSeries meanfield_series(const MeanFieldParams& p, std::span<const double> times);

struct MeanFieldSolution {
  TimeSeries n;                // real part of n_l(t)
  std::vector<double> n_imag;  // should stay at round-off level
  std::vector<Complex> x;
};

// Integrates
//   x' = i phi x + 2 i X_inf(t) (2 n - Q),
//   n' = 2 i (x conj(X_inf) - X_inf conj(x)),
// Q = n0 + k0, with adaptive Dormand-Prince (rel 1e-10, abs 1e-12).
// Throws NumericalError if the step size collapses.
MeanFieldSolution integrate_meanfield_ode(const MeanFieldParams& p,
                                          std::span<const double> times);

// X_i = a_i c_i^dagger for closed-market trader `trader`.
MatrixOperator x_operator(const SpacePtr& space, int trader);

struct XAlgebra {
  MatrixOperator x_xdag;     // [X_i, X_j^dagger]
  MatrixOperator x_shares;   // [X_i, n_j]
  MatrixOperator x_cash;     // [X_i, k_j]
};
XAlgebra x_algebra(const SpacePtr& space, int i, int j);

}  // namespace fockmarket
