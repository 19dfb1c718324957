#include "fockmarket/price_ladder.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fockmarket {

FactorialWeight factorial_weight(int k, int M, FactorialKind kind) {
  if (k < 0 || M < 0) {
    throw StateError(fmt::format("factorial weight needs k, M >= 0 (got {}, {})", k, M));
  }
  FactorialWeight w{k, M, kind, 1.0, 0.0, false};
  if (kind == FactorialKind::kFalling && M > k) {
    w.value = 0.0;
    w.log_value = -std::numeric_limits<double>::infinity();
    return w;
  }
  const double log_threshold = std::log(kSaturationThreshold);
  double value = 1.0;
  double log_value = 0.0;
  bool in_log = false;
  for (int i = 0; i < M; ++i) {
    const double factor =
        kind == FactorialKind::kFalling ? static_cast<double>(k - i)
                                        : static_cast<double>(k + 1 + i);
    log_value += std::log(factor);
    if (!in_log) {
      value *= factor;
      if (value > kSaturationThreshold) in_log = true;
    }
  }
  if (in_log || log_value > log_threshold) {
    w.saturated = true;
    w.value = std::exp(log_value);  // may be +inf
  } else {
    w.value = value;
  }
  w.log_value = log_value;
  return w;
}

double falling_factorial(int k, int M) {
  return factorial_weight(k, M, FactorialKind::kFalling).value;
}

double rising_factorial(int k, int M) {
  return factorial_weight(k, M, FactorialKind::kRising).value;
}

namespace {

void check_modes(const FockSpace& space, std::size_t cash_mode, std::size_t price_mode) {
  if (cash_mode == price_mode) {
    throw ModeError("cash and price modes must differ");
  }
  if (space.label(cash_mode).kind != ModeKind::kCash) {
    throw ModeError(fmt::format("mode {} ({}) is not a cash mode", cash_mode,
                                space.label(cash_mode).name()));
  }
  if (space.label(price_mode).kind != ModeKind::kPrice) {
    throw ModeError(fmt::format("mode {} ({}) is not a price mode", price_mode,
                                space.label(price_mode).name()));
  }
}

template <typename Visit>
void visit_cash_power(const FockSpace& space, std::size_t cash_mode,
                      std::size_t price_mode, Ladder kind, Visit&& visit) {
  const int cash_cut = space.cutoff(cash_mode);
  const std::size_t stride = space.stride(cash_mode);
  for (std::size_t col = 0; col < space.dim(); ++col) {
    const int k = space.occupation(col, cash_mode);
    const int M = space.occupation(col, price_mode);
    if (M == 0) {
      visit(col, col, FactorialWeight{k, 0, FactorialKind::kFalling, 1.0, 0.0, false});
      continue;
    }
    if (kind == Ladder::kLower) {
      if (M > k) continue;
      visit(col - static_cast<std::size_t>(M) * stride, col,
            factorial_weight(k, M, FactorialKind::kFalling));
    } else {
      if (k + M > cash_cut) continue;
      visit(col + static_cast<std::size_t>(M) * stride, col,
            factorial_weight(k, M, FactorialKind::kRising));
    }
  }
}

}  // namespace

MatrixOperator cash_power_op(const SpacePtr& space, std::size_t cash_mode,
                             std::size_t price_mode, Ladder kind) {
  check_modes(*space, cash_mode, price_mode);
  std::vector<MatrixOperator::Triplet> triplets;
  triplets.reserve(space->dim());
  visit_cash_power(*space, cash_mode, price_mode, kind,
                   [&](std::size_t row, std::size_t col, const FactorialWeight& w) {
                     const double amp = w.saturated ? std::exp(0.5 * w.log_value)
                                                    : std::sqrt(w.value);
                     triplets.emplace_back(static_cast<std::int64_t>(row),
                                           static_cast<std::int64_t>(col),
                                           Complex(amp, 0.0));
                   });
  return MatrixOperator::from_triplets(space, triplets);
}

std::vector<std::size_t> cash_power_saturation(const SpacePtr& space,
                                               std::size_t cash_mode,
                                               std::size_t price_mode, Ladder kind) {
  check_modes(*space, cash_mode, price_mode);
  std::vector<std::size_t> out;
  visit_cash_power(*space, cash_mode, price_mode, kind,
                   [&](std::size_t, std::size_t col, const FactorialWeight& w) {
                     if (w.saturated) out.push_back(col);
                   });
  return out;
}

}  // namespace fockmarket
