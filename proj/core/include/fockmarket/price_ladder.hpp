#pragma once

// Price-controlled cash ladders c^P and (c^dag)^P. Acting on a basis vector
// with cash k and price M, the lowering ladder removes exactly M cash quanta
// and the raising ladder adds M, with falling/rising factorial amplitudes.

#include <cstddef>
#include <vector>

#include "fockmarket/fock_space.hpp"

namespace fockmarket {

enum class FactorialKind { kFalling, kRising };

// k^{-M} = k(k-1)...(k-M+1) and k^{+M} = (k+1)(k+2)...(k+M).
struct FactorialWeight {
  int k = 0;
  int M = 0;
  FactorialKind kind = FactorialKind::kFalling;
  double value = 1.0;
  // log(value); -infinity when value is zero.
  double log_value = 0.0;
  // value exceeds kSaturationThreshold and was accumulated in log space.
  bool saturated = false;
};

inline constexpr double kSaturationThreshold = 1e300;

FactorialWeight factorial_weight(int k, int M, FactorialKind kind);

// Shorthands returning only the value.
double falling_factorial(int k, int M);
double rising_factorial(int k, int M);

// c^P (kLower) or (c^dag)^P (kRaise) for the given cash and price modes.
// The raising ladder annihilates basis vectors whose cash would exceed the
// cash cutoff. Throws ModeError for equal or invalid modes, or when the modes
// are not labelled cash and price respectively.
MatrixOperator cash_power_op(const SpacePtr& space, std::size_t cash_mode,
                             std::size_t price_mode, Ladder kind);

// Basis indices (columns) whose ladder amplitude saturated. Empty for every
// space small enough to diagonalize.
std::vector<std::size_t> cash_power_saturation(const SpacePtr& space,
                                               std::size_t cash_mode,
                                               std::size_t price_mode, Ladder kind);

}  // namespace fockmarket
