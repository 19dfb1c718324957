#pragma once

// Heisenberg evolution on truncated spaces, the closed-form price/supply
// solution, portfolio observables and the nested-commutator series of
// e^{iHt} X e^{-iHt}.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fockmarket/fock_space.hpp"
#include "fockmarket/market_models.hpp"
#include "fockmarket/time_series.hpp"

namespace fockmarket {

struct EvolveOptions {
  // Required only when the space is not closed under the model's conserved
  // totals: every occupation of the initial state plus `margin` must stay
  // within its cutoff.
  std::optional<int> margin;
  double hermiticity_tol = 1e-12;
};

// Throws MarginError unless truncation provably cannot reach the dynamics of
// `state`: either every mode's cutoff covers the conserved total of its kind,
// or an explicit margin is declared and respected.
void check_truncation_margin(const MarketModel& model, const NumberState& state,
                             std::optional<int> margin);

// Exact evolution of one initial number state. H is block-diagonal over the
// connected components of its sparsity graph, so only the component that
// contains the initial state is diagonalized.
class Evolver {
 public:
  Evolver(const MarketModel& model, const NumberState& initial, EvolveOptions options = {});

  // omega(e^{iHt} X e^{-iHt}) on the initial state.
  Complex expectation(const MatrixOperator& observable, double t) const;
  std::vector<Complex> expectations(const MatrixOperator& observable,
                                    std::span<const double> times) const;
  // Real part as a TimeSeries. Throws NumericalError when the imaginary
  // part exceeds 1e-8 (observable not Hermitian on the sector).
  TimeSeries series(const MatrixOperator& observable, std::span<const double> times,
                    std::string label) const;

  std::size_t sector_dim() const { return sector_.size(); }
  std::span<const std::size_t> sector() const { return sector_; }
  std::span<const double> eigenvalues() const {
    return {eigenvalues_.data(), static_cast<std::size_t>(eigenvalues_.size())};
  }

 private:
  Eigen::VectorXcd state_at(double t) const;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> restrict(const MatrixOperator& op) const;

  SpacePtr space_;
  std::vector<std::size_t> sector_;
  std::unordered_map<std::size_t, std::size_t> position_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  Eigen::VectorXcd initial_coefficients_;
};

TimeSeries evolve_expectation(const MarketModel& model, const MatrixOperator& observable,
                              const NumberState& state, std::span<const double> times,
                              std::string label, EvolveOptions options = {});

// P(t) and O(t) of the decoupled price/supply block with exchange coupling
// `lambda`: P(t) = ((M+O) + (M-O) cos 2 lambda t) / 2, O(t) = M + O - P(t).
struct PriceSupply {
  double price;
  double supply;
};
PriceSupply price_supply_closed_form(int M, int O, double t, double lambda);

// Pi_j = P n_j + k_j when `gamma` is unset, otherwise gamma n_j + k_j.
// Fixed-value portfolios are only meaningful for the effective model; the
// price-weighted form is defined for every model (trader 0 is the
// distinguished trader of the open market).
MatrixOperator portfolio_operator(const MarketModel& model, int trader,
                                  std::optional<double> gamma = std::nullopt);

TimeSeries portfolio_series(const Evolver& evolver, const MarketModel& model, int trader,
                            std::span<const double> times,
                            std::optional<double> gamma = std::nullopt);

// Effective model: Pi_j(t) = Pi_j(0) + (gamma - M)(n_j(t) - n_j(0)), the
// reduction through the conserved Q_j. `shares` is the n_j(t) series.
TimeSeries portfolio_from_shares(const MarketModel& model, double gamma,
                                 double initial_portfolio, const TimeSeries& shares);

// coeffs[m] = omega( i^m / m! [H,[H,...[H, X]]] ) with m nested commutators.
struct SeriesCoefficients {
  std::vector<Complex> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  // sum_{m <= truncate_at} coeffs[m] t^m (all orders when unset).
  Complex evaluate(double t, std::optional<int> truncate_at = std::nullopt) const;
};

// Nested commutators are formed as sparse matrices on the principal block of
// basis states within order+1 steps of `state` in the graph of H and X; the
// (state, state) entry only sees paths inside that block.
SeriesCoefficients heisenberg_series(const MarketModel& model, const MatrixOperator& observable,
                                     const NumberState& state, int order,
                                     std::optional<int> margin = std::nullopt);

}  // namespace fockmarket
