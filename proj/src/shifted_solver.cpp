// SPDX-License-Identifier: Apache-2.0
#include "abtl/shifted_solver.hpp"

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "abtl/errors.hpp"

namespace abtl {

namespace {

using SparseLUBase = Eigen::SparseLU<ComplexSparseMatrix, Eigen::COLAMDOrdering<int>>;

// The diagonal of U lives in the supernodal L storage; expose it for the
// pivot test.
class PivotedSparseLU : public SparseLUBase {
 public:
  std::pair<double, double> pivot_range() const {
    double largest = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < this->cols(); ++j) {
      double pivot = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.index() == j) {
          pivot = std::abs(it.value());
          break;
        }
      }
      largest = std::max(largest, pivot);
      smallest = std::min(smallest, pivot);
    }
    return {smallest, largest};
  }
};

void check_pivots(double smallest, double largest, cplx shift) {
  if (!(largest > 0.0) || !(smallest > kPivotTolerance * largest) || !std::isfinite(largest)) {
    throw SingularShiftError(shift, "shifted factorization");
  }
}

}  // namespace

struct ShiftedFactorization::Impl {
  std::variant<Eigen::PartialPivLU<ComplexMatrix>, std::unique_ptr<PivotedSparseLU>> lu;
};

ShiftedFactorization::ShiftedFactorization(const ComplexSparseMatrix& shifted, cplx shift,
                                           Index dense_threshold)
    : shift_(shift), size_(shifted.rows()), impl_(std::make_unique<Impl>()) {
  if (shifted.rows() != shifted.cols()) {
    throw DimensionError("shifted factorization requires a square matrix");
  }
  if (size_ == 0) throw DimensionError("shifted factorization of an empty matrix");
  if (size_ <= dense_threshold) {
    Eigen::PartialPivLU<ComplexMatrix> lu{ComplexMatrix(shifted)};
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    check_pivots(diag.minCoeff(), diag.maxCoeff(), shift);
    impl_->lu = std::move(lu);
  } else {
    auto lu = std::make_unique<PivotedSparseLU>();
    ComplexSparseMatrix compressed = shifted;
    compressed.makeCompressed();
    lu->compute(compressed);
    if (lu->info() != Eigen::Success) throw SingularShiftError(shift, "sparse LU");
    const auto [smallest, largest] = lu->pivot_range();
    check_pivots(smallest, largest, shift);
    impl_->lu = std::move(lu);
  }
}

ShiftedFactorization::~ShiftedFactorization() = default;

bool ShiftedFactorization::is_dense() const {
  return std::holds_alternative<Eigen::PartialPivLU<ComplexMatrix>>(impl_->lu);
}

ComplexMatrix ShiftedFactorization::solve(const ComplexMatrix& rhs) const {
  if (rhs.rows() != size_) throw DimensionError("solve: right-hand side has wrong row count");
  if (auto* dense = std::get_if<Eigen::PartialPivLU<ComplexMatrix>>(&impl_->lu)) {
    return dense->solve(rhs);
  }
  const auto& sparse = std::get<std::unique_ptr<PivotedSparseLU>>(impl_->lu);
  return sparse->solve(rhs);
}

ComplexMatrix ShiftedFactorization::solve_transposed(const ComplexMatrix& rhs) const {
  if (rhs.rows() != size_) throw DimensionError("solve: right-hand side has wrong row count");
  if (auto* dense = std::get_if<Eigen::PartialPivLU<ComplexMatrix>>(&impl_->lu)) {
    return dense->transpose().solve(rhs);
  }
  const auto& sparse = std::get<std::unique_ptr<PivotedSparseLU>>(impl_->lu);
  ComplexMatrix out = sparse->transpose().solve(rhs);
  return out;
}

ComplexSparseMatrix shifted_operator(const SparseMatrix& A, cplx sigma) {
  if (A.rows() != A.cols()) throw DimensionError("shifted operator requires square A");
  ComplexSparseMatrix shifted = -A.cast<cplx>();
  ComplexSparseMatrix identity(A.rows(), A.cols());
  identity.setIdentity();
  shifted += sigma * identity;
  shifted.makeCompressed();
  return shifted;
}

std::shared_ptr<const ShiftedFactorization> factorize(const SparseMatrix& A, cplx sigma,
                                                      Index dense_threshold) {
  if (is_infinite(sigma)) throw SingularShiftError(sigma, "factorize");
  return std::make_shared<const ShiftedFactorization>(shifted_operator(A, sigma), sigma,
                                                      dense_threshold);
}

SolverCache::SolverCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::invalid_argument, "cache capacity must be positive");
}

std::shared_ptr<const ShiftedSolve> SolverCache::get(cplx shift, const Factory& factory) {
  {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return e.first == shift; });
    if (it != entries_.end()) {
      entries_.splice(entries_.begin(), entries_, it);
      return entries_.front().second;
    }
    ++misses_;
  }
  auto fresh = factory(shift);
  std::lock_guard lock(mutex_);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.first == shift; });
  if (it != entries_.end()) {
    entries_.splice(entries_.begin(), entries_, it);
    return entries_.front().second;
  }
  entries_.emplace_front(shift, std::move(fresh));
  while (entries_.size() > capacity_) entries_.pop_back();
  return entries_.front().second;
}

std::size_t SolverCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

bool SolverCache::contains(cplx shift) const {
  std::lock_guard lock(mutex_);
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.first == shift; });
}

std::size_t SolverCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

void SolverCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

}  // namespace abtl
