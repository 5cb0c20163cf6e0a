// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "abtl/shifted_solver.hpp"
#include "abtl/types.hpp"

namespace abtl {

/// A first-order realization x' = A x + B u, y = C x seen through the
/// operations the reduction needs. A may be stored explicitly or applied
/// implicitly (see LinearizedSystem).
class LinearSystem {
 public:
  virtual ~LinearSystem() = default;

  virtual Index order() const = 0;
  Index ports() const { return input().cols(); }

  /// B, n x p.
  virtual const Matrix& input() const = 0;
  /// C, p x n.
  virtual const Matrix& output() const = 0;

  virtual ComplexMatrix apply(const ComplexMatrix& X) const = 0;
  virtual ComplexMatrix apply_transposed(const ComplexMatrix& X) const = 0;

  /// Factorization of (sigma I - A), possibly served from a cache.
  virtual std::shared_ptr<const ShiftedSolve> factorize(cplx sigma) const = 0;
};

/// Sparse realization (A, B, C) with B, C dense.
class FirstOrderSystem final : public LinearSystem {
 public:
  FirstOrderSystem(SparseMatrix A, Matrix B, Matrix C,
                   std::size_t cache_capacity = SolverCache::kDefaultCapacity);

  Index order() const override { return A_.rows(); }
  const SparseMatrix& state_matrix() const { return A_; }
  const Matrix& input() const override { return B_; }
  const Matrix& output() const override { return C_; }

  ComplexMatrix apply(const ComplexMatrix& X) const override;
  ComplexMatrix apply_transposed(const ComplexMatrix& X) const override;

  /// Cached factorization used by the reduction.
  std::shared_ptr<const ShiftedSolve> factorize(cplx sigma) const override;
  const SolverCache& cache() const { return *cache_; }

 private:
  SparseMatrix A_;
  Matrix B_;
  Matrix C_;
  std::shared_ptr<SolverCache> cache_;
};

/// Dense reduced model (A_m, B_m, C_m) obtained by oblique projection.
struct ReducedModel {
  ComplexMatrix A;  // ms x ms
  ComplexMatrix B;  // ms x p
  ComplexMatrix C;  // p x ms
  Index iterations = 0;
  Index block_width = 0;

  Index order() const { return A.rows(); }
  Index ports() const { return B.cols(); }
};

/// H(omega) = C (omega I - A)^{-1} B by one factored block solve. The
/// factorization is not cached.
ComplexMatrix eval_transfer(const FirstOrderSystem& sys, cplx omega);
/// Same contract for any realization (uses its factorize()).
ComplexMatrix eval_transfer(const LinearSystem& sys, cplx omega);

/// H_m(omega) = C_m (omega I - A_m)^{-1} B_m.
ComplexMatrix eval_reduced_transfer(const ReducedModel& rm, cplx omega);

/// i-th moment C (sigma I - A)^{-(i+1)} B. H(w) = sum_i (-1)^i moment_i (w - sigma)^i,
/// hence moment_i = (-1)^i H^(i)(sigma) / i!.
ComplexMatrix moment(const LinearSystem& sys, cplx sigma, int i);
ComplexMatrix reduced_moment(const ReducedModel& rm, cplx sigma, int i);

/// C A^i B.
Matrix markov_parameter(const FirstOrderSystem& sys, int i);

/// Dense LU of (omega I - M) with the relative pivot test; throws
/// SingularShiftError carrying omega.
Eigen::PartialPivLU<ComplexMatrix> dense_resolvent(const ComplexMatrix& M, cplx omega);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& M);

}  // namespace abtl
