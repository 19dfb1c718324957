#pragma once

// Hamiltonians of the three market models and their integrals of motion.
//
// Mode ordering convention (fixed, so basis indices are stable):
//   shares, then cash, then supply, then price; traders in index order.
//
//   two-trader:   a1 a2 | c1 c2 | o | p                 (owners 1, 2)
//   effective-L:  a1..aL | c1..cL | o | p                (owners 1..L)
//   open market:  a A_1..A_m | c C_1..C_m | o_1..o_m | p (owner 0 is the
//                 distinguished trader, 1..m the reservoir labels)

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockmarket/fock_space.hpp"

namespace fockmarket {

enum class ModelKind { kTwoTrader, kEffective, kOpenMarket };

std::string to_string(ModelKind kind);

struct ModelParams {
  // Free frequencies of the distinguished trader (open market). For the
  // closed models omega_p is the common frequency of the price and supply
  // modes.
  double omega_a = 1.0;
  double omega_c = 1.0;
  double omega_p = 1.0;

  // Reservoir frequencies over the finite label set Lambda (open market).
  std::vector<double> Omega_A;
  std::vector<double> Omega_C;
  std::vector<double> Omega_O;

  // Per-trader frequencies (closed models).
  std::vector<double> alpha;
  std::vector<double> beta;

  // Symmetric trader interaction with zero diagonal (closed models). An
  // empty matrix means unit coupling between every pair.
  Eigen::MatrixXd p;

  // Coupling constant: the price/supply exchange strength in the closed
  // models, the overall interaction strength in the open market.
  double lambda = 1.0;

  // Smearing amplitudes over Lambda (open market).
  std::vector<Complex> f;
  std::vector<Complex> g;

  std::size_t lambda_size() const { return Omega_A.size(); }
  double coupling(std::size_t i, std::size_t j) const;

  // Throws Error describing the first violated invariant.
  void validate(ModelKind kind, std::size_t traders) const;
};

struct NamedOperator {
  std::string name;
  MatrixOperator op;
};

struct MarketModel {
  ModelKind kind;
  ModelParams params;
  SpacePtr space;
  MatrixOperator hamiltonian;
  // Number of traders in the closed models; reservoir size for the open
  // market.
  std::size_t traders = 0;
  // c-number price of the effective model; unset otherwise.
  std::optional<int> frozen_price;
};

// --- mode layouts and default spaces ---------------------------------------

std::vector<ModeLabel> closed_market_labels(std::size_t traders);
std::vector<ModeLabel> open_market_labels(std::size_t reservoir_size);

// Closed-market state: shares, cash per trader, then supply and price.
NumberState closed_market_state(const std::vector<int>& shares,
                                const std::vector<int>& cash, int supply, int price);
NumberState two_trader_state(int n1, int n2, int k1, int k2, int supply, int price);

// Open-market state: system (n, k) and per-reservoir-label (N_k, K_k, O_k),
// plus the price.
struct OpenMarketState {
  int n = 0;
  int k = 0;
  int price = 0;
  std::vector<int> reservoir_shares;
  std::vector<int> reservoir_cash;
  std::vector<int> reservoir_supply;

  NumberState to_number_state() const;
};

// Cutoffs equal to the conserved totals carried by `initial`: every share
// mode gets the total share count, every cash mode the total cash, every
// supply and price mode the total of price plus supply. Conservation makes
// this truncation exact for the models below.
SpacePtr conserved_closed_space(std::size_t traders, const NumberState& initial);
SpacePtr conserved_open_space(std::size_t reservoir_size, const NumberState& initial);

// --- builders ---------------------------------------------------------------

MarketModel build_two_trader(const ModelParams& params, const SpacePtr& space);
MarketModel build_effective_L(const ModelParams& params, int price, const SpacePtr& space);
MarketModel build_open_market(const ModelParams& params, const SpacePtr& space);

// For the effective model: the trading part h and the decoupled
// price/supply block h_po, with H = h + h_po.
struct SplitHamiltonian {
  MatrixOperator h;
  MatrixOperator h_po;
};
SplitHamiltonian split_price_block(const MarketModel& model);

// Closed models: the same space and parameters with H replaced by the
// price/supply block omega_p (o^dag o + p^dag p) + lambda (o^dag p + p^dag o)
// alone. In the two-trader model the trade term depends on P, so this block
// does not commute with the rest of H.
MarketModel price_block_model(const MarketModel& model);

// N, K, Gamma for every model; Delta = o - p and Q_j for the effective model
// (Delta only when the price frequency equals the exchange coupling, Q_j only
// for a nonzero frozen price).
std::vector<NamedOperator> conserved_operators(const MarketModel& model);

// P n_j + k_j (trader j of a closed model, or the distinguished trader of the
// open market when j = 0).
MatrixOperator price_weighted_portfolio(const MarketModel& model, int trader);

// Totals of shares, cash and price+supply carried by a number state.
struct ConservedTotals {
  int shares = 0;
  int cash = 0;
  int price_supply = 0;
};
ConservedTotals conserved_totals(const FockSpace& space, const NumberState& state);

}  // namespace fockmarket
