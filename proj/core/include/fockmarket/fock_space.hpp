#pragma once

// Truncated multi-mode bosonic Fock space and the sparse operator algebra
// built on top of it.
//
// Basis vectors are occupation tuples (n_0, ..., n_{m-1}) with
// 0 <= n_i <= cutoff_i. They are indexed in mixed radix with mode 0 the most
// significant digit, so iteration over indices is lexicographic in the
// occupation tuple.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "fockmarket/errors.hpp"

namespace fockmarket {

using Complex = std::complex<double>;

enum class ModeKind { kShare, kCash, kSupply, kPrice };

// Semantic label of a mode. `owner` is the trader index the mode belongs to
// (0 for the distinguished trader of the open market and for global modes
// such as the price).
struct ModeLabel {
  ModeKind kind = ModeKind::kShare;
  int owner = 0;

  std::string name() const;
  bool operator==(const ModeLabel&) const = default;
};

class NumberState {
 public:
  NumberState() = default;
  explicit NumberState(std::vector<int> occupations);
  NumberState(std::initializer_list<int> occupations);

  std::span<const int> occupations() const { return occupations_; }
  int operator[](std::size_t mode) const { return occupations_.at(mode); }
  std::size_t size() const { return occupations_.size(); }

  NumberState with(std::size_t mode, int occupation) const;
  std::string to_string() const;

  bool operator==(const NumberState&) const = default;

 private:
  std::vector<int> occupations_;
};

class FockSpace {
 public:
  static constexpr std::size_t kDefaultMaxDim = 8'000'000;

  // Throws ModeError for an empty mode list or mismatched label count and
  // CapacityError when the product of (cutoff+1) exceeds `max_dim`.
  FockSpace(std::vector<int> cutoffs, std::vector<ModeLabel> labels,
            std::size_t max_dim = kDefaultMaxDim);

  std::size_t dim() const { return dim_; }
  std::size_t num_modes() const { return cutoffs_.size(); }
  std::span<const int> cutoffs() const { return cutoffs_; }
  int cutoff(std::size_t mode) const;
  const ModeLabel& label(std::size_t mode) const;
  std::span<const ModeLabel> labels() const { return labels_; }

  std::optional<std::size_t> find_mode(ModeKind kind, int owner) const;
  // Like find_mode but throws ModeError when absent.
  std::size_t mode(ModeKind kind, int owner) const;
  std::vector<std::size_t> modes_of(ModeKind kind) const;

  bool contains(const NumberState& state) const;
  std::size_t index_of(const NumberState& state) const;
  NumberState state_at(std::size_t index) const;
  int occupation(std::size_t index, std::size_t mode) const {
    return static_cast<int>((index / strides_[mode]) %
                            static_cast<std::size_t>(cutoffs_[mode] + 1));
  }
  std::size_t stride(std::size_t mode) const { return strides_[mode]; }

  bool operator==(const FockSpace& other) const;

 private:
  std::vector<int> cutoffs_;
  std::vector<ModeLabel> labels_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
};

using SpacePtr = std::shared_ptr<const FockSpace>;

SpacePtr build_space(std::vector<int> cutoffs, std::vector<ModeLabel> labels,
                     std::size_t max_dim = FockSpace::kDefaultMaxDim);

// Sparse complex matrix acting on the basis of a FockSpace. Immutable; every
// arithmetic operation returns a new operator.
class MatrixOperator {
 public:
  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor, std::int64_t>;
  using Triplet = Eigen::Triplet<Complex, std::int64_t>;

  MatrixOperator(SpacePtr space, Sparse matrix);

  static MatrixOperator zero(SpacePtr space);
  static MatrixOperator identity(SpacePtr space);
  static MatrixOperator from_triplets(SpacePtr space,
                                      const std::vector<Triplet>& triplets);
  // Diagonal operator with entry `value(index)`; zeros are not stored.
  static MatrixOperator diagonal(SpacePtr space,
                                 const std::function<double(std::size_t)>& value);

  const FockSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Sparse& matrix() const { return matrix_; }
  std::size_t dim() const { return space_->dim(); }
  std::size_t nonzeros() const;

  Complex entry(std::size_t row, std::size_t col) const;
  MatrixOperator adjoint() const;
  double max_abs() const;

  // Visits stored entries in (row, col) order.
  void for_each_entry(
      const std::function<void(std::size_t, std::size_t, Complex)>& visit) const;

  // Debug serialization: "row,col,re,im" lines sorted by (row, col), entries
  // with |value| <= drop_tol omitted.
  std::string to_csv(double drop_tol = 0.0) const;

  MatrixOperator operator+(const MatrixOperator& rhs) const;
  MatrixOperator operator-(const MatrixOperator& rhs) const;
  MatrixOperator operator*(const MatrixOperator& rhs) const;
  MatrixOperator operator-() const;
  MatrixOperator scaled(Complex factor) const;
  friend MatrixOperator operator*(Complex factor, const MatrixOperator& op) {
    return op.scaled(factor);
  }
  friend MatrixOperator operator*(double factor, const MatrixOperator& op) {
    return op.scaled(Complex(factor, 0.0));
  }

 private:
  void require_same_space(const MatrixOperator& other, const char* what) const;

  SpacePtr space_;
  Sparse matrix_;
};

enum class Ladder { kLower, kRaise };

// lower: n -> n-1 with sqrt(n); raise: n -> n+1 with sqrt(n+1). The raise
// operator annihilates the cutoff state.
MatrixOperator ladder(const SpacePtr& space, std::size_t mode, Ladder kind);
MatrixOperator number_operator(const SpacePtr& space, std::size_t mode);

// AB - BA. Throws SpaceMismatch if the operands live on different spaces.
MatrixOperator commutator(const MatrixOperator& a, const MatrixOperator& b);

// <phi_state, A phi_state>. Throws StateError if the state is outside the
// space.
Complex expectation(const NumberState& state, const MatrixOperator& op);

// max_ij |A_ij - A*_ji|
double hermiticity_defect(const MatrixOperator& op);

// Largest |entry| over columns whose basis state leaves at least margins[m]
// quanta of headroom below the cutoff of every mode m. This is the
// "interior subspace" on which truncated identities are asserted.
double max_abs_on_interior(const MatrixOperator& op, std::span<const int> margins);
// Same with one margin for all modes.
double max_abs_on_interior(const MatrixOperator& op, int margin);

}  // namespace fockmarket
