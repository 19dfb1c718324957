#include "fockmarket/exact_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace fockmarket {

namespace {

using SectorSparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Breadth-first search over the union of the sparsity graphs of `ops`,
// starting at `start`, up to `max_depth` steps (unbounded when negative).
std::vector<std::size_t> reachable(std::span<const MatrixOperator* const> ops,
                                   std::size_t start, int max_depth) {
  std::unordered_map<std::size_t, int> depth{{start, 0}};
  std::deque<std::size_t> queue{start};
  std::vector<std::size_t> out{start};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    const int d = depth[v];
    if (max_depth >= 0 && d >= max_depth) continue;
    auto visit = [&](std::size_t w) {
      if (depth.emplace(w, d + 1).second) {
        queue.push_back(w);
        out.push_back(w);
      }
    };
    for (const MatrixOperator* op : ops) {
      const auto& m = op->matrix();
      // Row v lists edges v <- col; columns of the adjoint are the other
      // direction. Both are needed for non-Hermitian observables.
      for (MatrixOperator::Sparse::InnerIterator it(m, static_cast<std::int64_t>(v)); it;
           ++it) {
        visit(static_cast<std::size_t>(it.col()));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> reachable_any(std::span<const MatrixOperator* const> ops,
                                       std::size_t start, int max_depth) {
  // For a non-Hermitian operator the row pattern alone misses incoming
  // edges; include adjoints so the search is undirected.
  std::vector<MatrixOperator> adjoints;
  adjoints.reserve(ops.size());
  for (const MatrixOperator* op : ops) adjoints.push_back(op->adjoint());
  std::vector<const MatrixOperator*> all(ops.begin(), ops.end());
  for (const auto& a : adjoints) all.push_back(&a);
  return reachable(all, start, max_depth);
}

SectorSparse restrict_to(const MatrixOperator& op, std::span<const std::size_t> sector,
                         const std::unordered_map<std::size_t, std::size_t>& position) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t r = 0; r < sector.size(); ++r) {
    for (MatrixOperator::Sparse::InnerIterator it(op.matrix(),
                                                  static_cast<std::int64_t>(sector[r]));
         it; ++it) {
      auto found = position.find(static_cast<std::size_t>(it.col()));
      if (found == position.end()) continue;
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(found->second), it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(sector.size());
  SectorSparse out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::unordered_map<std::size_t, std::size_t> positions_of(
    std::span<const std::size_t> sector) {
  std::unordered_map<std::size_t, std::size_t> out;
  out.reserve(sector.size());
  for (std::size_t i = 0; i < sector.size(); ++i) out.emplace(sector[i], i);
  return out;
}

bool conservation_closed(const MarketModel& model, const NumberState& state) {
  const FockSpace& space = *model.space;
  const ConservedTotals totals = conserved_totals(space, state);
  for (std::size_t m = 0; m < space.num_modes(); ++m) {
    int needed = 0;
    switch (space.label(m).kind) {
      case ModeKind::kShare:
        needed = totals.shares;
        break;
      case ModeKind::kCash:
        needed = totals.cash;
        break;
      case ModeKind::kSupply:
      case ModeKind::kPrice:
        needed = totals.price_supply;
        break;
    }
    if (space.cutoff(m) < needed) return false;
  }
  return true;
}

}  // namespace

void check_truncation_margin(const MarketModel& model, const NumberState& state,
                             std::optional<int> margin) {
  const FockSpace& space = *model.space;
  if (!space.contains(state)) {
    throw StateError(fmt::format("state {} is outside the space", state.to_string()));
  }
  if (conservation_closed(model, state)) return;
  if (!margin) {
    throw MarginError(fmt::format(
        "cutoffs do not cover the conserved totals of {}; declare a margin",
        state.to_string()));
  }
  for (std::size_t m = 0; m < space.num_modes(); ++m) {
    if (state[m] + *margin > space.cutoff(m)) {
      throw MarginError(fmt::format("mode {} occupation {} + margin {} exceeds cutoff {}",
                                    space.label(m).name(), state[m], *margin,
                                    space.cutoff(m)));
    }
  }
}

// --- Evolver ----------------------------------------------------------------

Evolver::Evolver(const MarketModel& model, const NumberState& initial, EvolveOptions options)
    : space_(model.space) {
  check_truncation_margin(model, initial, options.margin);
  const MatrixOperator& h = model.hamiltonian;
  const double defect = hermiticity_defect(h);
  if (defect > options.hermiticity_tol) {
    throw NumericalError(fmt::format("Hamiltonian is not Hermitian (defect {:.3e})", defect));
  }
  const std::size_t start = space_->index_of(initial);
  const MatrixOperator* ops[] = {&h};
  sector_ = reachable(ops, start, -1);
  position_ = positions_of(sector_);

  const auto n = static_cast<Eigen::Index>(sector_.size());
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(restrict_to(h, sector_, position_));
  dense = 0.5 * (dense + dense.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0(static_cast<Eigen::Index>(position_.at(start))) = 1.0;
  initial_coefficients_ = eigenvectors_.adjoint() * e0;
}

Eigen::VectorXcd Evolver::state_at(double t) const {
  Eigen::VectorXcd phased(initial_coefficients_.size());
  for (Eigen::Index i = 0; i < phased.size(); ++i) {
    phased(i) = std::polar(1.0, -eigenvalues_(i) * t) * initial_coefficients_(i);
  }
  return eigenvectors_ * phased;
}

Eigen::SparseMatrix<Complex, Eigen::RowMajor> Evolver::restrict(const MatrixOperator& op) const {
  if (!(op.space() == *space_)) {
    throw SpaceMismatch("observable lives on a different space than the model");
  }
  return restrict_to(op, sector_, position_);
}

Complex Evolver::expectation(const MatrixOperator& observable, double t) const {
  const auto x = restrict(observable);
  const Eigen::VectorXcd psi = state_at(t);
  return psi.dot(x * psi);
}

std::vector<Complex> Evolver::expectations(const MatrixOperator& observable,
                                           std::span<const double> times) const {
  const auto x = restrict(observable);
  std::vector<Complex> out;
  out.reserve(times.size());
  for (double t : times) {
    const Eigen::VectorXcd psi = state_at(t);
    out.push_back(psi.dot(x * psi));
  }
  return out;
}

TimeSeries Evolver::series(const MatrixOperator& observable, std::span<const double> times,
                           std::string label) const {
  const auto values = expectations(observable, times);
  TimeSeries out(std::move(label));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double scale = std::max(1.0, std::abs(values[i]));
    if (std::abs(values[i].imag()) > 1e-8 * scale) {
      throw NumericalError(fmt::format("expectation of '{}' has imaginary part {:.3e}",
                                       out.label(), values[i].imag()));
    }
    out.append(times[i], values[i].real());
  }
  return out;
}

TimeSeries evolve_expectation(const MarketModel& model, const MatrixOperator& observable,
                              const NumberState& state, std::span<const double> times,
                              std::string label, EvolveOptions options) {
  const Evolver evolver(model, state, options);
  return evolver.series(observable, times, std::move(label));
}

PriceSupply price_supply_closed_form(int M, int O, double t, double lambda) {
  if (M < 0 || O < 0) throw Error("price and supply quanta must be >= 0");
  const double sum = static_cast<double>(M + O);
  const double diff = static_cast<double>(M - O);
  const double c = std::cos(2.0 * lambda * t);
  return {0.5 * (sum + diff * c), 0.5 * (sum - diff * c)};
}

// --- portfolio ----------------------------------------------------------------

MatrixOperator portfolio_operator(const MarketModel& model, int trader,
                                  std::optional<double> gamma) {
  const SpacePtr& s = model.space;
  if (!gamma) return price_weighted_portfolio(model, trader);
  if (model.kind != ModelKind::kEffective) {
    throw Error(fmt::format("a fixed share value applies to the effective model, not {}",
                            to_string(model.kind)));
  }
  return *gamma * number_operator(s, s->mode(ModeKind::kShare, trader)) +
         number_operator(s, s->mode(ModeKind::kCash, trader));
}

TimeSeries portfolio_series(const Evolver& evolver, const MarketModel& model, int trader,
                            std::span<const double> times, std::optional<double> gamma) {
  return evolver.series(portfolio_operator(model, trader, gamma), times,
                        fmt::format("portfolio{}", trader));
}

TimeSeries portfolio_from_shares(const MarketModel& model, double gamma,
                                 double initial_portfolio, const TimeSeries& shares) {
  if (model.kind != ModelKind::kEffective || !model.frozen_price) {
    throw Error("the share-count reduction needs the effective model");
  }
  const double M = static_cast<double>(*model.frozen_price);
  TimeSeries out("portfolio");
  const double n0 = shares.value(0);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    out.append(shares.time(i), initial_portfolio + (gamma - M) * (shares.value(i) - n0));
  }
  return out;
}

// --- series -------------------------------------------------------------------

Complex SeriesCoefficients::evaluate(double t, std::optional<int> truncate_at) const {
  const int last = truncate_at ? std::min(*truncate_at, order()) : order();
  Complex sum(0.0, 0.0);
  double power = 1.0;
  for (int m = 0; m <= last; ++m) {
    sum += coeffs[static_cast<std::size_t>(m)] * power;
    power *= t;
  }
  return sum;
}

SeriesCoefficients heisenberg_series(const MarketModel& model, const MatrixOperator& observable,
                                     const NumberState& state, int order,
                                     std::optional<int> margin) {
  if (order < 0) throw Error("series order must be >= 0");
  check_truncation_margin(model, state, margin);
  if (!(observable.space() == *model.space)) {
    throw SpaceMismatch("observable lives on a different space than the model");
  }
  const std::size_t start = model.space->index_of(state);
  const MatrixOperator* ops[] = {&model.hamiltonian, &observable};
  const std::vector<std::size_t> ball = reachable_any(ops, start, order + 1);
  const auto position = positions_of(ball);
  const SectorSparse h = restrict_to(model.hamiltonian, ball, position);
  SectorSparse nested = restrict_to(observable, ball, position);
  const auto origin = static_cast<Eigen::Index>(position.at(start));

  SeriesCoefficients out;
  out.coeffs.reserve(static_cast<std::size_t>(order) + 1);
  Complex i_power(1.0, 0.0);
  double factorial = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) {
      nested = (h * nested - nested * h).pruned();
      i_power *= Complex(0.0, 1.0);
      factorial *= m;
    }
    out.coeffs.push_back(i_power / factorial * nested.coeff(origin, origin));
  }
  return out;
}

}  // namespace fockmarket
