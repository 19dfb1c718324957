#pragma once

// First-iterate ("fixed-point-like") approximation of the open market with a
// single reservoir trader: price P_c(t) from the decoupled price/supply
// block, the eta functions, r(t), and the share, cash and portfolio
// trajectories of the distinguished trader.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockmarket/fock_space.hpp"
#include "fockmarket/time_series.hpp"

namespace fockmarket {

struct FplParams {
  int M = 1;  // initial price
  int O = 2;  // initial supply
  double lam = 1.0;
  double omega_a = 1.0;
  double omega_c = 1.0;
  double Omega_A = 2.0;
  double Omega_C = 2.0;
  int n = 10;     // shares of the distinguished trader
  int k = 10;     // cash of the distinguished trader
  int n_res = 0;  // reservoir trader shares
  int k_res = 0;  // reservoir trader cash
  Complex f{1.0, 0.0};
  // State coefficients; computed from the occupations above when unset.
  std::optional<double> w1;
  std::optional<double> w2;

  void validate() const;
};

// P_c(t) = ((M+O) + (M-O) cos 2 lam t) / 2
double price_at(const FplParams& p, double t);

struct PhaseCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_tilde = 0.0;
  double beta_tilde = 0.0;
};

// alpha = ((M+O) omega_c - 2 omega_a)/2, beta = omega_c (M-O) / (4 lam), the
// tilde pair with Omega_C, Omega_A. Throws DegenerateParameters for lam = 0.
PhaseCoefficients phase_coefficients(const FplParams& p);

struct Phases {
  double chi = 0.0;
  double chi_tilde = 0.0;
};
// chi(t) = alpha t + beta sin(2 lam t), likewise chi_tilde.
Phases phases(double t, const FplParams& p);

struct Etas {
  Complex eta1{1.0, 0.0};
  Complex eta2{0.0, 0.0};
  Complex eta1_tilde{1.0, 0.0};
  Complex eta2_tilde{0.0, 0.0};
};

enum class Quadrature { kAdaptive, kSimpson };

// eta1 = 1 + i int_0^t (P_c omega_c - omega_a) e^{i chi}
// eta2 = i lam int_0^t e^{i chi_tilde}
// eta1_tilde = 1 + i int_0^t (P_c Omega_C - Omega_A) e^{i chi_tilde}
// eta2_tilde = i lam int_0^t e^{i chi}
// Adaptive Gauss-Kronrod at relative tolerance 1e-9 (NumericalError when
// the error estimate is not met) or composite Simpson with 10^4 panels per
// unit time.
Etas eta_functions(double t, const FplParams& p, Quadrature method = Quadrature::kAdaptive);

struct OmegaCoefficients {
  double w1 = 0.0;
  double w2 = 0.0;
};

// w1 = |f|^2 (1+n) k^{-M} [n' k_o^{+M} - (1+n') k_o^{-M}]
// w2 = |f|^2 (1+n') k_o^{-M} [n k^{+M} - (1+n) k^{-M}]
// with n' = n_res, k_o = k_res. Explicit overrides in `p` win.
OmegaCoefficients omega_coefficients(const FplParams& p);

// w1 eta1 conj(eta2_tilde) + w2 eta2 conj(eta1_tilde)
Complex r_of_t(double t, const FplParams& p, Quadrature method = Quadrature::kAdaptive);

struct FplTrajectory {
  TimeSeries pc{"Pc"};
  TimeSeries n{"n"};
  TimeSeries k{"k"};
  TimeSeries delta_pi{"delta_pi"};
  // Running integrals int_0^t r and int_0^t P_c r at each sample.
  std::vector<Complex> int_r;
  std::vector<Complex> int_pc_r;

  std::span<const double> times() const { return pc.times(); }
  // Columns t,Pc,n,k,delta_pi; 12 significant digits.
  std::string to_csv() const;
};

// n(t) = n - 2 lam Im int_0^t r
// k(t) = k + 2 lam Im int_0^t P_c r
// dPi(t) = n (O-M) sin^2(lam t)
//          - 2 lam Im(int r) (M + (O-M) sin^2(lam t)) + 2 lam Im(int P_c r)
// `times` must be nonnegative and strictly increasing; integrals accumulate
// interval by interval from 0. lam = 0 yields constant n, k and dPi = 0.
FplTrajectory trajectory(const FplParams& p, std::span<const double> times,
                         Quadrature method = Quadrature::kAdaptive);

// Replaces r by the zeroth-order product omega(z^dag Z(f)) e^{-i(chi -
// chi_tilde)}, with the expectation taken on the number state of the
// six-mode open market (|Lambda| = 1). Returns true when n(t) and k(t) drift
// by less than 1e-12.
struct ZerothOrderCheck {
  bool constant = false;
  Complex expectation{0.0, 0.0};
  double max_drift = 0.0;
};
ZerothOrderCheck zeroth_order_check(const FplParams& p, std::span<const double> times);

}  // namespace fockmarket
