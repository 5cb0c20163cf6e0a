// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <utility>

#include "abtl/types.hpp"

namespace abtl {

/// Factorization of a shifted operator (sigma I - A). One factorization
/// serves solves with the operator and with its (non-conjugated) transpose.
/// Instances are immutable; concurrent solves are safe.
class ShiftedSolve {
 public:
  virtual ~ShiftedSolve() = default;
  virtual cplx shift() const = 0;
  virtual Index size() const = 0;
  /// X with (sigma I - A) X = rhs.
  virtual ComplexMatrix solve(const ComplexMatrix& rhs) const = 0;
  /// Y with (sigma I - A)^T Y = rhs.
  virtual ComplexMatrix solve_transposed(const ComplexMatrix& rhs) const = 0;
};

/// Relative pivot threshold below which a factorization is declared singular.
inline constexpr double kPivotTolerance = 1e-14;
/// Matrices up to this order are factorized densely.
inline constexpr Index kDenseFallbackOrder = 500;

/// LU factorization of a general complex square matrix, sparse or dense
/// depending on its order. Raises SingularShiftError (carrying `shift`) when
/// the smallest pivot falls below kPivotTolerance times the largest one.
class ShiftedFactorization final : public ShiftedSolve {
 public:
  ShiftedFactorization(const ComplexSparseMatrix& shifted, cplx shift,
                       Index dense_threshold = kDenseFallbackOrder);
  ~ShiftedFactorization() override;

  ShiftedFactorization(const ShiftedFactorization&) = delete;
  ShiftedFactorization& operator=(const ShiftedFactorization&) = delete;

  cplx shift() const override { return shift_; }
  Index size() const override { return size_; }
  bool is_dense() const;
  ComplexMatrix solve(const ComplexMatrix& rhs) const override;
  ComplexMatrix solve_transposed(const ComplexMatrix& rhs) const override;

 private:
  struct Impl;
  cplx shift_;
  Index size_;
  std::unique_ptr<Impl> impl_;
};

/// Builds sigma I - A in complex sparse form.
ComplexSparseMatrix shifted_operator(const SparseMatrix& A, cplx sigma);

/// Factorizes (sigma I - A).
std::shared_ptr<const ShiftedFactorization> factorize(const SparseMatrix& A, cplx sigma,
                                                      Index dense_threshold = kDenseFallbackOrder);

/// Bounded shift -> factorization map with least-recently-used eviction.
/// Lookup compares shifts exactly. Eviction only drops work, results are
/// unaffected.
class SolverCache {
 public:
  using Factory = std::function<std::shared_ptr<const ShiftedSolve>(cplx)>;

  static constexpr std::size_t kDefaultCapacity = 8;

  explicit SolverCache(std::size_t capacity = kDefaultCapacity);

  std::shared_ptr<const ShiftedSolve> get(cplx shift, const Factory& factory);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  bool contains(cplx shift) const;
  std::size_t misses() const;
  void clear();

 private:
  using Entry = std::pair<cplx, std::shared_ptr<const ShiftedSolve>>;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> entries_;  // most recently used first
  std::size_t misses_ = 0;
};

}  // namespace abtl
