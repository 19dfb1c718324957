#include "fockmarket/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace fockmarket {

std::string ModeLabel::name() const {
  const char* prefix = "?";
  switch (kind) {
    case ModeKind::kShare:
      prefix = "share";
      break;
    case ModeKind::kCash:
      prefix = "cash";
      break;
    case ModeKind::kSupply:
      prefix = "supply";
      break;
    case ModeKind::kPrice:
      prefix = "price";
      break;
  }
  return fmt::format("{}{}", prefix, owner);
}

NumberState::NumberState(std::vector<int> occupations)
    : occupations_(std::move(occupations)) {
  for (int n : occupations_) {
    if (n < 0) {
      throw StateError(fmt::format("negative occupation {} in number state", n));
    }
  }
}

NumberState::NumberState(std::initializer_list<int> occupations)
    : NumberState(std::vector<int>(occupations)) {}

NumberState NumberState::with(std::size_t mode, int occupation) const {
  std::vector<int> copy = occupations_;
  copy.at(mode) = occupation;
  return NumberState(std::move(copy));
}

std::string NumberState::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < occupations_.size(); ++i) {
    if (i != 0) out += ",";
    out += std::to_string(occupations_[i]);
  }
  return out + ")";
}

FockSpace::FockSpace(std::vector<int> cutoffs, std::vector<ModeLabel> labels,
                     std::size_t max_dim)
    : cutoffs_(std::move(cutoffs)), labels_(std::move(labels)) {
  if (cutoffs_.empty()) throw ModeError("a Fock space needs at least one mode");
  if (labels_.size() != cutoffs_.size()) {
    throw ModeError(fmt::format("{} cutoffs but {} mode labels", cutoffs_.size(),
                                labels_.size()));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (labels_[i] == labels_[j]) {
        throw ModeError(fmt::format("duplicate mode label {}", labels_[i].name()));
      }
    }
  }
  strides_.assign(cutoffs_.size(), 1);
  std::size_t dim = 1;
  for (std::size_t m = cutoffs_.size(); m-- > 0;) {
    if (cutoffs_[m] < 0) {
      throw ModeError(fmt::format("negative cutoff for mode {}", m));
    }
    strides_[m] = dim;
    const auto radix = static_cast<std::size_t>(cutoffs_[m]) + 1;
    if (dim > max_dim / radix) {
      throw CapacityError(fmt::format(
          "Fock space dimension exceeds the configured maximum {}", max_dim));
    }
    dim *= radix;
  }
  if (dim > max_dim) {
    throw CapacityError(
        fmt::format("Fock space dimension {} exceeds the maximum {}", dim, max_dim));
  }
  dim_ = dim;
}

int FockSpace::cutoff(std::size_t mode) const {
  if (mode >= cutoffs_.size()) {
    throw ModeError(fmt::format("mode {} out of range ({} modes)", mode,
                                cutoffs_.size()));
  }
  return cutoffs_[mode];
}

const ModeLabel& FockSpace::label(std::size_t mode) const {
  if (mode >= labels_.size()) {
    throw ModeError(fmt::format("mode {} out of range ({} modes)", mode,
                                labels_.size()));
  }
  return labels_[mode];
}

std::optional<std::size_t> FockSpace::find_mode(ModeKind kind, int owner) const {
  const ModeLabel wanted{kind, owner};
  for (std::size_t m = 0; m < labels_.size(); ++m) {
    if (labels_[m] == wanted) return m;
  }
  return std::nullopt;
}

std::size_t FockSpace::mode(ModeKind kind, int owner) const {
  if (auto m = find_mode(kind, owner)) return *m;
  throw ModeError(fmt::format("space has no mode {}", ModeLabel{kind, owner}.name()));
}

std::vector<std::size_t> FockSpace::modes_of(ModeKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < labels_.size(); ++m) {
    if (labels_[m].kind == kind) out.push_back(m);
  }
  return out;
}

bool FockSpace::contains(const NumberState& state) const {
  if (state.size() != cutoffs_.size()) return false;
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
    if (state[m] > cutoffs_[m]) return false;
  }
  return true;
}

std::size_t FockSpace::index_of(const NumberState& state) const {
  if (!contains(state)) {
    throw StateError(fmt::format("state {} is outside the space", state.to_string()));
  }
  std::size_t index = 0;
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
    index += static_cast<std::size_t>(state[m]) * strides_[m];
  }
  return index;
}

NumberState FockSpace::state_at(std::size_t index) const {
  if (index >= dim_) {
    throw StateError(fmt::format("basis index {} out of range {}", index, dim_));
  }
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t m = 0; m < cutoffs_.size(); ++m) occ[m] = occupation(index, m);
  return NumberState(std::move(occ));
}

bool FockSpace::operator==(const FockSpace& other) const {
  return cutoffs_ == other.cutoffs_ && labels_ == other.labels_;
}

SpacePtr build_space(std::vector<int> cutoffs, std::vector<ModeLabel> labels,
                     std::size_t max_dim) {
  return std::make_shared<const FockSpace>(std::move(cutoffs), std::move(labels),
                                           max_dim);
}

// --- MatrixOperator -------------------------------------------------------

MatrixOperator::MatrixOperator(SpacePtr space, Sparse matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (!space_) throw SpaceMismatch("operator constructed without a space");
  const auto dim = static_cast<std::int64_t>(space_->dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw SpaceMismatch(fmt::format("matrix is {}x{} but the space has dim {}",
                                    matrix_.rows(), matrix_.cols(), dim));
  }
  matrix_.makeCompressed();
}

MatrixOperator MatrixOperator::zero(SpacePtr space) {
  const auto dim = static_cast<std::int64_t>(space->dim());
  return MatrixOperator(std::move(space), Sparse(dim, dim));
}

MatrixOperator MatrixOperator::identity(SpacePtr space) {
  return diagonal(std::move(space), [](std::size_t) { return 1.0; });
}

MatrixOperator MatrixOperator::from_triplets(SpacePtr space,
                                             const std::vector<Triplet>& triplets) {
  const auto dim = static_cast<std::int64_t>(space->dim());
  Sparse m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(Complex(0.0, 0.0));
  return MatrixOperator(std::move(space), std::move(m));
}

MatrixOperator MatrixOperator::diagonal(
    SpacePtr space, const std::function<double(std::size_t)>& value) {
  std::vector<Triplet> triplets;
  triplets.reserve(space->dim());
  for (std::size_t i = 0; i < space->dim(); ++i) {
    const double v = value(i);
    if (v != 0.0) {
      const auto ii = static_cast<std::int64_t>(i);
      triplets.emplace_back(ii, ii, Complex(v, 0.0));
    }
  }
  return from_triplets(std::move(space), triplets);
}

std::size_t MatrixOperator::nonzeros() const {
  return static_cast<std::size_t>(matrix_.nonZeros());
}

Complex MatrixOperator::entry(std::size_t row, std::size_t col) const {
  if (row >= dim() || col >= dim()) {
    throw StateError(fmt::format("entry ({}, {}) outside dim {}", row, col, dim()));
  }
  return matrix_.coeff(static_cast<std::int64_t>(row), static_cast<std::int64_t>(col));
}

MatrixOperator MatrixOperator::adjoint() const {
  Sparse adj = matrix_.adjoint();
  return MatrixOperator(space_, std::move(adj));
}

double MatrixOperator::max_abs() const {
  double out = 0.0;
  const Complex* values = matrix_.valuePtr();
  for (std::int64_t i = 0; i < matrix_.nonZeros(); ++i) {
    out = std::max(out, std::abs(values[i]));
  }
  return out;
}

void MatrixOperator::for_each_entry(
    const std::function<void(std::size_t, std::size_t, Complex)>& visit) const {
  for (std::int64_t row = 0; row < matrix_.outerSize(); ++row) {
    for (Sparse::InnerIterator it(matrix_, row); it; ++it) {
      visit(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()),
            it.value());
    }
  }
}

std::string MatrixOperator::to_csv(double drop_tol) const {
  std::string out = "row,col,re,im\n";
  for_each_entry([&](std::size_t r, std::size_t c, Complex v) {
    if (std::abs(v) <= drop_tol) return;
    out += fmt::format("{},{},{:.12g},{:.12g}\n", r, c, v.real(), v.imag());
  });
  return out;
}

void MatrixOperator::require_same_space(const MatrixOperator& other,
                                        const char* what) const {
  if (space_ == other.space_) return;
  if (*space_ == *other.space_) return;
  throw SpaceMismatch(fmt::format("{}: operands live on different spaces", what));
}

MatrixOperator MatrixOperator::operator+(const MatrixOperator& rhs) const {
  require_same_space(rhs, "operator+");
  Sparse sum = matrix_ + rhs.matrix_;
  return MatrixOperator(space_, std::move(sum));
}

MatrixOperator MatrixOperator::operator-(const MatrixOperator& rhs) const {
  require_same_space(rhs, "operator-");
  Sparse diff = matrix_ - rhs.matrix_;
  return MatrixOperator(space_, std::move(diff));
}

MatrixOperator MatrixOperator::operator*(const MatrixOperator& rhs) const {
  require_same_space(rhs, "operator*");
  Sparse prod = (matrix_ * rhs.matrix_).pruned();
  return MatrixOperator(space_, std::move(prod));
}

MatrixOperator MatrixOperator::operator-() const { return scaled(Complex(-1.0, 0.0)); }

MatrixOperator MatrixOperator::scaled(Complex factor) const {
  Sparse m = matrix_ * factor;
  return MatrixOperator(space_, std::move(m));
}

// --- free functions -------------------------------------------------------

MatrixOperator ladder(const SpacePtr& space, std::size_t mode, Ladder kind) {
  const int cut = space->cutoff(mode);
  const std::size_t stride = space->stride(mode);
  std::vector<MatrixOperator::Triplet> triplets;
  triplets.reserve(space->dim());
  for (std::size_t col = 0; col < space->dim(); ++col) {
    const int n = space->occupation(col, mode);
    if (kind == Ladder::kLower) {
      if (n == 0) continue;
      triplets.emplace_back(static_cast<std::int64_t>(col - stride),
                            static_cast<std::int64_t>(col),
                            Complex(std::sqrt(static_cast<double>(n)), 0.0));
    } else {
      if (n == cut) continue;
      triplets.emplace_back(static_cast<std::int64_t>(col + stride),
                            static_cast<std::int64_t>(col),
                            Complex(std::sqrt(static_cast<double>(n + 1)), 0.0));
    }
  }
  return MatrixOperator::from_triplets(space, triplets);
}

MatrixOperator number_operator(const SpacePtr& space, std::size_t mode) {
  space->cutoff(mode);  // validates the mode index
  return MatrixOperator::diagonal(space, [&](std::size_t i) {
    return static_cast<double>(space->occupation(i, mode));
  });
}

MatrixOperator commutator(const MatrixOperator& a, const MatrixOperator& b) {
  return a * b - b * a;
}

Complex expectation(const NumberState& state, const MatrixOperator& op) {
  const std::size_t i = op.space().index_of(state);
  return op.entry(i, i);
}

double hermiticity_defect(const MatrixOperator& op) {
  MatrixOperator::Sparse diff = op.matrix() - MatrixOperator::Sparse(op.matrix().adjoint());
  double out = 0.0;
  for (std::int64_t i = 0; i < diff.nonZeros(); ++i) {
    out = std::max(out, std::abs(diff.valuePtr()[i]));
  }
  return out;
}

double max_abs_on_interior(const MatrixOperator& op, std::span<const int> margins) {
  const FockSpace& space = op.space();
  if (margins.size() != space.num_modes()) {
    throw ModeError(fmt::format("{} margins for {} modes", margins.size(),
                                space.num_modes()));
  }
  auto interior = [&](std::size_t index) {
    for (std::size_t m = 0; m < space.num_modes(); ++m) {
      if (space.occupation(index, m) + margins[m] > space.cutoff(m)) return false;
    }
    return true;
  };
  double out = 0.0;
  op.for_each_entry([&](std::size_t, std::size_t col, Complex v) {
    if (interior(col)) out = std::max(out, std::abs(v));
  });
  return out;
}

double max_abs_on_interior(const MatrixOperator& op, int margin) {
  std::vector<int> margins(op.space().num_modes(), margin);
  return max_abs_on_interior(op, margins);
}

}  // namespace fockmarket
