#include "fockmarket/market_models.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fockmarket/price_ladder.hpp"

namespace fockmarket {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTwoTrader:
      return "two-trader";
    case ModelKind::kEffective:
      return "effective-L";
    case ModelKind::kOpenMarket:
      return "open-market";
  }
  return "unknown";
}

double ModelParams::coupling(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (p.size() == 0) return 1.0;
  return p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

void ModelParams::validate(ModelKind kind, std::size_t traders) const {
  if (kind == ModelKind::kOpenMarket) {
    const std::size_t n = Omega_A.size();
    if (n == 0) throw Error("open market needs a nonempty reservoir label set");
    if (Omega_C.size() != n || Omega_O.size() != n || f.size() != n || g.size() != n) {
      throw Error(fmt::format(
          "reservoir arrays disagree in size (Omega_A {}, Omega_C {}, Omega_O {}, f {}, g {})",
          n, Omega_C.size(), Omega_O.size(), f.size(), g.size()));
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (Omega_A[k] < 0 || Omega_C[k] < 0 || Omega_O[k] < 0) {
        throw Error(fmt::format("negative reservoir frequency at label {}", k));
      }
    }
    if (lambda < 0) throw Error("coupling lambda must be >= 0");
    return;
  }
  if (!alpha.empty() && alpha.size() != traders) {
    throw Error(fmt::format("alpha has {} entries for {} traders", alpha.size(), traders));
  }
  if (!beta.empty() && beta.size() != traders) {
    throw Error(fmt::format("beta has {} entries for {} traders", beta.size(), traders));
  }
  if (p.size() != 0) {
    if (static_cast<std::size_t>(p.rows()) != traders ||
        static_cast<std::size_t>(p.cols()) != traders) {
      throw Error(fmt::format("interaction matrix must be {}x{}", traders, traders));
    }
    for (std::size_t i = 0; i < traders; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (p(ii, ii) != 0.0) throw Error("interaction matrix needs p_ii = 0");
      for (std::size_t j = 0; j < traders; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (p(ii, jj) != p(jj, ii)) throw Error("interaction matrix must be symmetric");
        if (p(ii, jj) < 0) throw Error("interaction matrix must be nonnegative");
      }
    }
  }
  if (lambda < 0) throw Error("coupling lambda must be >= 0");
}

// --- layouts ----------------------------------------------------------------

std::vector<ModeLabel> closed_market_labels(std::size_t traders) {
  std::vector<ModeLabel> labels;
  for (std::size_t j = 1; j <= traders; ++j)
    labels.push_back({ModeKind::kShare, static_cast<int>(j)});
  for (std::size_t j = 1; j <= traders; ++j)
    labels.push_back({ModeKind::kCash, static_cast<int>(j)});
  labels.push_back({ModeKind::kSupply, 0});
  labels.push_back({ModeKind::kPrice, 0});
  return labels;
}

std::vector<ModeLabel> open_market_labels(std::size_t reservoir_size) {
  std::vector<ModeLabel> labels;
  for (std::size_t j = 0; j <= reservoir_size; ++j)
    labels.push_back({ModeKind::kShare, static_cast<int>(j)});
  for (std::size_t j = 0; j <= reservoir_size; ++j)
    labels.push_back({ModeKind::kCash, static_cast<int>(j)});
  for (std::size_t j = 1; j <= reservoir_size; ++j)
    labels.push_back({ModeKind::kSupply, static_cast<int>(j)});
  labels.push_back({ModeKind::kPrice, 0});
  return labels;
}

NumberState closed_market_state(const std::vector<int>& shares,
                                const std::vector<int>& cash, int supply, int price) {
  if (shares.size() != cash.size()) {
    throw StateError("shares and cash lists must have one entry per trader");
  }
  std::vector<int> occ(shares);
  occ.insert(occ.end(), cash.begin(), cash.end());
  occ.push_back(supply);
  occ.push_back(price);
  return NumberState(std::move(occ));
}

NumberState two_trader_state(int n1, int n2, int k1, int k2, int supply, int price) {
  return closed_market_state({n1, n2}, {k1, k2}, supply, price);
}

NumberState OpenMarketState::to_number_state() const {
  const std::size_t m = reservoir_shares.size();
  if (reservoir_cash.size() != m || reservoir_supply.size() != m) {
    throw StateError("reservoir state arrays disagree in size");
  }
  std::vector<int> occ;
  occ.push_back(n);
  occ.insert(occ.end(), reservoir_shares.begin(), reservoir_shares.end());
  occ.push_back(k);
  occ.insert(occ.end(), reservoir_cash.begin(), reservoir_cash.end());
  occ.insert(occ.end(), reservoir_supply.begin(), reservoir_supply.end());
  occ.push_back(price);
  return NumberState(std::move(occ));
}

namespace {

std::vector<int> conserved_cutoffs(const std::vector<ModeLabel>& labels,
                                   const NumberState& initial) {
  if (initial.size() != labels.size()) {
    throw StateError(fmt::format("state has {} modes, layout has {}", initial.size(),
                                 labels.size()));
  }
  ConservedTotals t;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    switch (labels[m].kind) {
      case ModeKind::kShare:
        t.shares += initial[m];
        break;
      case ModeKind::kCash:
        t.cash += initial[m];
        break;
      case ModeKind::kSupply:
      case ModeKind::kPrice:
        t.price_supply += initial[m];
        break;
    }
  }
  std::vector<int> cutoffs(labels.size());
  for (std::size_t m = 0; m < labels.size(); ++m) {
    switch (labels[m].kind) {
      case ModeKind::kShare:
        cutoffs[m] = t.shares;
        break;
      case ModeKind::kCash:
        cutoffs[m] = t.cash;
        break;
      case ModeKind::kSupply:
      case ModeKind::kPrice:
        cutoffs[m] = t.price_supply;
        break;
    }
  }
  return cutoffs;
}

}  // namespace

ConservedTotals conserved_totals(const FockSpace& space, const NumberState& state) {
  if (!space.contains(state)) {
    throw StateError(fmt::format("state {} is outside the space", state.to_string()));
  }
  ConservedTotals t;
  for (std::size_t m = 0; m < space.num_modes(); ++m) {
    switch (space.label(m).kind) {
      case ModeKind::kShare:
        t.shares += state[m];
        break;
      case ModeKind::kCash:
        t.cash += state[m];
        break;
      case ModeKind::kSupply:
      case ModeKind::kPrice:
        t.price_supply += state[m];
        break;
    }
  }
  return t;
}

SpacePtr conserved_closed_space(std::size_t traders, const NumberState& initial) {
  auto labels = closed_market_labels(traders);
  auto cutoffs = conserved_cutoffs(labels, initial);
  return build_space(std::move(cutoffs), std::move(labels));
}

SpacePtr conserved_open_space(std::size_t reservoir_size, const NumberState& initial) {
  auto labels = open_market_labels(reservoir_size);
  auto cutoffs = conserved_cutoffs(labels, initial);
  return build_space(std::move(cutoffs), std::move(labels));
}

// --- builders ---------------------------------------------------------------

namespace {

std::size_t count_traders(const FockSpace& space) {
  std::size_t n = 0;
  while (space.find_mode(ModeKind::kShare, static_cast<int>(n + 1))) ++n;
  return n;
}

MatrixOperator n_op(const SpacePtr& s, ModeKind kind, int owner) {
  return number_operator(s, s->mode(kind, owner));
}

MatrixOperator lower(const SpacePtr& s, ModeKind kind, int owner) {
  return ladder(s, s->mode(kind, owner), Ladder::kLower);
}

MatrixOperator raise(const SpacePtr& s, ModeKind kind, int owner) {
  return ladder(s, s->mode(kind, owner), Ladder::kRaise);
}

// Ordinary power of a matrix operator (identity for 0).
MatrixOperator power(const MatrixOperator& op, int exponent) {
  MatrixOperator out = MatrixOperator::identity(op.space_ptr());
  for (int i = 0; i < exponent; ++i) out = out * op;
  return out;
}

// Price/supply block: omega_p (o^dag o + p^dag p) + lambda (o^dag p + p^dag o).
MatrixOperator price_supply_block(const ModelParams& params, const SpacePtr& s) {
  const auto o = lower(s, ModeKind::kSupply, 0);
  const auto od = raise(s, ModeKind::kSupply, 0);
  const auto p = lower(s, ModeKind::kPrice, 0);
  const auto pd = raise(s, ModeKind::kPrice, 0);
  return params.omega_p * (n_op(s, ModeKind::kSupply, 0) + n_op(s, ModeKind::kPrice, 0)) +
         params.lambda * (od * p + pd * o);
}

MatrixOperator closed_free_part(const ModelParams& params, const SpacePtr& s,
                                std::size_t traders) {
  MatrixOperator h0 = MatrixOperator::zero(s);
  for (std::size_t j = 0; j < traders; ++j) {
    const int owner = static_cast<int>(j + 1);
    const double a = params.alpha.empty() ? 0.0 : params.alpha[j];
    const double b = params.beta.empty() ? 0.0 : params.beta[j];
    if (a != 0.0) h0 = h0 + a * n_op(s, ModeKind::kShare, owner);
    if (b != 0.0) h0 = h0 + b * n_op(s, ModeKind::kCash, owner);
  }
  return h0;
}

void require_closed_layout(const FockSpace& space, std::size_t traders) {
  for (std::size_t j = 1; j <= traders; ++j) {
    space.mode(ModeKind::kShare, static_cast<int>(j));
    space.mode(ModeKind::kCash, static_cast<int>(j));
  }
  space.mode(ModeKind::kSupply, 0);
  space.mode(ModeKind::kPrice, 0);
}

MatrixOperator symmetrized(const MatrixOperator& h) {
  return 0.5 * (h + h.adjoint());
}

}  // namespace

MarketModel build_two_trader(const ModelParams& params, const SpacePtr& space) {
  require_closed_layout(*space, 2);
  params.validate(ModelKind::kTwoTrader, 2);
  const SpacePtr& s = space;
  const std::size_t price = s->mode(ModeKind::kPrice, 0);

  // a1^dag a2 c1^P (c2^dag)^P: trader 1 buys one share from trader 2 and
  // pays P cash quanta.
  const auto c1_pow = cash_power_op(s, s->mode(ModeKind::kCash, 1), price, Ladder::kLower);
  const auto c2d_pow = cash_power_op(s, s->mode(ModeKind::kCash, 2), price, Ladder::kRaise);
  const MatrixOperator trade = raise(s, ModeKind::kShare, 1) *
                               lower(s, ModeKind::kShare, 2) * c1_pow * c2d_pow;
  const MatrixOperator h =
      closed_free_part(params, s, 2) + params.coupling(0, 1) * (trade + trade.adjoint()) +
      price_supply_block(params, s);
  return MarketModel{ModelKind::kTwoTrader, params, s, symmetrized(h), 2, std::nullopt};
}

MarketModel build_effective_L(const ModelParams& params, int price, const SpacePtr& space) {
  const std::size_t traders = count_traders(*space);
  if (traders < 2) throw ModeError("effective model needs at least two traders");
  if (price < 0) throw Error("frozen price must be >= 0");
  require_closed_layout(*space, traders);
  params.validate(ModelKind::kEffective, traders);
  const SpacePtr& s = space;

  MatrixOperator h = closed_free_part(params, s, traders);
  for (std::size_t i = 0; i < traders; ++i) {
    for (std::size_t j = 0; j < traders; ++j) {
      const double pij = params.coupling(i, j);
      if (pij == 0.0) continue;
      const int oi = static_cast<int>(i + 1);
      const int oj = static_cast<int>(j + 1);
      // a_i^dag a_j (c_i c_j^dag)^M + a_i a_j^dag (c_j c_i^dag)^M
      const MatrixOperator ci_cjd =
          power(lower(s, ModeKind::kCash, oi) * raise(s, ModeKind::kCash, oj), price);
      const MatrixOperator cj_cid =
          power(lower(s, ModeKind::kCash, oj) * raise(s, ModeKind::kCash, oi), price);
      h = h + pij * (raise(s, ModeKind::kShare, oi) * lower(s, ModeKind::kShare, oj) * ci_cjd +
                     lower(s, ModeKind::kShare, oi) * raise(s, ModeKind::kShare, oj) * cj_cid);
    }
  }
  h = h + price_supply_block(params, s);
  return MarketModel{ModelKind::kEffective, params, s, symmetrized(h), traders, price};
}

MarketModel build_open_market(const ModelParams& params, const SpacePtr& space) {
  params.validate(ModelKind::kOpenMarket, 0);
  const SpacePtr& s = space;
  const std::size_t m = params.lambda_size();
  const std::size_t price = s->mode(ModeKind::kPrice, 0);
  s->mode(ModeKind::kShare, 0);
  s->mode(ModeKind::kCash, 0);
  for (std::size_t k = 1; k <= m; ++k) {
    const int owner = static_cast<int>(k);
    s->mode(ModeKind::kShare, owner);
    s->mode(ModeKind::kCash, owner);
    s->mode(ModeKind::kSupply, owner);
  }

  MatrixOperator h0 = params.omega_a * n_op(s, ModeKind::kShare, 0) +
                      params.omega_c * n_op(s, ModeKind::kCash, 0) +
                      params.omega_p * n_op(s, ModeKind::kPrice, 0);
  for (std::size_t k = 0; k < m; ++k) {
    const int owner = static_cast<int>(k + 1);
    h0 = h0 + params.Omega_A[k] * n_op(s, ModeKind::kShare, owner) +
         params.Omega_C[k] * n_op(s, ModeKind::kCash, owner) +
         params.Omega_O[k] * n_op(s, ModeKind::kSupply, owner);
  }

  // z = a (c^dag)^P; Z(f) = sum_k f(k) A_k (C_k^dag)^P.
  const MatrixOperator z =
      lower(s, ModeKind::kShare, 0) *
      cash_power_op(s, s->mode(ModeKind::kCash, 0), price, Ladder::kRaise);
  MatrixOperator Zf = MatrixOperator::zero(s);
  MatrixOperator og = MatrixOperator::zero(s);
  for (std::size_t k = 0; k < m; ++k) {
    const int owner = static_cast<int>(k + 1);
    const MatrixOperator Zk =
        lower(s, ModeKind::kShare, owner) *
        cash_power_op(s, s->mode(ModeKind::kCash, owner), price, Ladder::kRaise);
    Zf = Zf + params.f[k] * Zk;
    og = og + params.g[k] * lower(s, ModeKind::kSupply, owner);
  }
  const MatrixOperator p = lower(s, ModeKind::kPrice, 0);
  // z^dag Z(f) + z Z^dag(conj f) + p^dag o(g) + p o^dag(conj g)
  const MatrixOperator hi = z.adjoint() * Zf + z * Zf.adjoint() + p.adjoint() * og +
                            p * og.adjoint();
  const MatrixOperator h = h0 + params.lambda * hi;
  return MarketModel{ModelKind::kOpenMarket, params, s, symmetrized(h), m, std::nullopt};
}

SplitHamiltonian split_price_block(const MarketModel& model) {
  if (model.kind != ModelKind::kEffective) {
    throw Error("the price/supply block decouples only in the effective model");
  }
  const MatrixOperator h_po = price_supply_block(model.params, model.space);
  return {model.hamiltonian - h_po, h_po};
}

MarketModel price_block_model(const MarketModel& model) {
  if (model.kind == ModelKind::kOpenMarket) {
    throw Error("the open market has no separate price/supply block");
  }
  MarketModel out = model;
  out.hamiltonian = price_supply_block(model.params, model.space);
  return out;
}

std::vector<NamedOperator> conserved_operators(const MarketModel& model) {
  const SpacePtr& s = model.space;
  auto sum_of = [&](ModeKind kind) {
    MatrixOperator out = MatrixOperator::zero(s);
    for (std::size_t m : s->modes_of(kind)) out = out + number_operator(s, m);
    return out;
  };
  std::vector<NamedOperator> out;
  out.push_back({"N", sum_of(ModeKind::kShare)});
  out.push_back({"K", sum_of(ModeKind::kCash)});
  out.push_back({"Gamma", sum_of(ModeKind::kSupply) + sum_of(ModeKind::kPrice)});

  if (model.kind == ModelKind::kEffective) {
    if (model.params.omega_p == model.params.lambda) {
      out.push_back({"Delta", lower(s, ModeKind::kSupply, 0) - lower(s, ModeKind::kPrice, 0)});
    }
    const int price = model.frozen_price.value_or(0);
    if (price > 0) {
      for (std::size_t j = 1; j <= model.traders; ++j) {
        const int owner = static_cast<int>(j);
        out.push_back({fmt::format("Q{}", j),
                       n_op(s, ModeKind::kShare, owner) +
                           (1.0 / price) * n_op(s, ModeKind::kCash, owner)});
      }
    }
  }
  return out;
}

MatrixOperator price_weighted_portfolio(const MarketModel& model, int trader) {
  const SpacePtr& s = model.space;
  return n_op(s, ModeKind::kPrice, 0) * n_op(s, ModeKind::kShare, trader) +
         n_op(s, ModeKind::kCash, trader);
}

}  // namespace fockmarket
