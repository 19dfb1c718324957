#pragma once

// Weak-coupling (van Hove) limit of the open market: detuning functions over
// the reservoir labels, the Gamma constants, the Markov generator acting on
// system observables, and stationarity verdicts for n, k and the portfolio.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fockmarket/fock_space.hpp"
#include "fockmarket/market_models.hpp"

namespace fockmarket {

struct EpsilonProfile {
  // eps_Z(k) = P_mean (Omega_C(k) - omega_c) - (Omega_A(k) - omega_a)
  std::vector<double> eps_Z;
  // eps_O(k) = omega_p - Omega_O(k)
  std::vector<double> eps_O;
};

EpsilonProfile epsilon_profiles(const ModelParams& params, double price_mean);

// Reservoir number state: shares N_k, cash K_k and supply O_k per label.
struct ReservoirState {
  std::vector<int> shares;
  std::vector<int> cash;
  std::vector<int> supply;

  std::size_t size() const { return shares.size(); }
  void validate(std::size_t labels) const;
};

// Delta masses on the finite label set. The verdicts always use the
// indicator |eps| < zero_tol; a Lorentzian of the given width (peak 1) only
// changes magnitudes.
struct DeltaOptions {
  double zero_tol = 1e-12;
  std::optional<double> lorentzian_width;
};

struct GammaCoefficients {
  Complex gz_a{0.0, 0.0};
  Complex gz_b{0.0, 0.0};
  Complex go_a{0.0, 0.0};
  Complex go_b{0.0, 0.0};
};

// Real parts (imaginary parts are left at 0):
//   Re gz_a = pi sum_k |f_k|^2 (N_k + 1) K_k^{-M} delta(eps_Z(k))
//   Re gz_b = pi sum_k |f_k|^2 N_k K_k^{+M}       delta(eps_Z(k))
//   Re go_a = pi sum_k |g_k|^2 (O_k + 1)          delta(eps_O(k))
//   Re go_b = pi sum_k |g_k|^2 O_k                delta(eps_O(k))
// M is the price eigenvalue entering the reservoir cash ladders.
GammaCoefficients gamma_coefficients(const ModelParams& params,
                                     const ReservoirState& reservoir, int price,
                                     const EpsilonProfile& profile,
                                     const DeltaOptions& delta = {});

// Operators of the distinguished trader on the system space (a, c, p).
struct SystemOperators {
  SpacePtr space;
  MatrixOperator z;  // a (c^dag)^P
  MatrixOperator p;
  MatrixOperator shares;
  MatrixOperator cash;
  MatrixOperator price;
  MatrixOperator portfolio;  // P n + k
};

std::vector<ModeLabel> system_labels();
SystemOperators system_operators(int share_cutoff, int cash_cutoff, int price_cutoff);

// L(X) = G_Za [z^dag, X] z - conj(G_Za) z^dag [z, X]
//      + G_Zb [z, X] z^dag - conj(G_Zb) z [z^dag, X]
//      + the same four terms with G_O and p.
// Throws ModeError when X lives on a space with non-system modes and
// SpaceMismatch when it lives on a different system space.
MatrixOperator generator_apply(const MatrixOperator& x, const GammaCoefficients& gammas,
                               const SystemOperators& sys);

struct StationarityVerdict {
  bool portfolio_stationary = false;
  bool occupations_stationary = false;
  std::vector<std::size_t> eps_Z_zeros;
  std::vector<std::size_t> eps_O_zeros;
  EpsilonProfile profile;
  GammaCoefficients gammas;
  // Largest |entry| of L(Pi), L(n), L(k).
  double norm_L_portfolio = 0.0;
  double norm_L_shares = 0.0;
  double norm_L_cash = 0.0;

  // Flat key=value lines, keys sorted.
  std::string to_report() const;
};

StationarityVerdict stationarity_verdict(const ModelParams& params,
                                         const ReservoirState& reservoir, int price,
                                         const SystemOperators& sys,
                                         const DeltaOptions& delta = {});

// Content of the brace multiplying -t in the second-order term on the system
// number state (n shares, k cash, price M):
//   n k^{+M} G_Za + (n+1) k^{-M} G_Zb + M G_Oa + (M+1) G_Ob.
Complex second_order_term(const GammaCoefficients& gammas, int n, int k, int M);

// Same quantity from expectations of z^dag z, z z^dag, p^dag p, p p^dag.
Complex second_order_term(const GammaCoefficients& gammas, const SystemOperators& sys,
                          const NumberState& system_state);

}  // namespace fockmarket
