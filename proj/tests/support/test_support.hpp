#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fockmarket/fock_space.hpp"

namespace fockmarket::testing {

// n distinct share modes with owners 0..n-1; enough for tests that only need
// a generic multi-mode space.
inline std::vector<ModeLabel> generic_labels(std::size_t n) {
  std::vector<ModeLabel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({ModeKind::kShare, static_cast<int>(i)});
  return out;
}

inline Eigen::MatrixXcd dense(const MatrixOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  op.for_each_entry([&](std::size_t r, std::size_t c, Complex v) {
    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
  });
  return out;
}

// Applies a sparse operator to a single basis vector and returns the
// resulting column as a dense vector.
inline Eigen::VectorXcd apply_to_basis(const MatrixOperator& op, std::size_t index) {
  return dense(op).col(static_cast<Eigen::Index>(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  Complex complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fockmarket::testing
