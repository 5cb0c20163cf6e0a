// SPDX-License-Identifier: Apache-2.0
#include "abtl/system.hpp"

#include <Eigen/SVD>

#include "abtl/errors.hpp"

namespace abtl {

FirstOrderSystem::FirstOrderSystem(SparseMatrix A, Matrix B, Matrix C, std::size_t cache_capacity)
    : A_(std::move(A)),
      B_(std::move(B)),
      C_(std::move(C)),
      cache_(std::make_shared<SolverCache>(cache_capacity)) {
  if (A_.rows() != A_.cols()) throw DimensionError("A must be square");
  if (B_.rows() != A_.rows()) throw DimensionError("B must have n rows");
  if (C_.cols() != A_.rows()) throw DimensionError("C must have n columns");
  if (B_.cols() < 1) throw DimensionError("B must have at least one column");
  if (C_.rows() != B_.cols()) throw DimensionError("C must have p rows (p = columns of B)");
  if (A_.rows() < B_.cols()) throw DimensionError("state dimension must be at least p");
  A_.makeCompressed();
}

ComplexMatrix FirstOrderSystem::apply(const ComplexMatrix& X) const {
  if (X.rows() != order()) throw DimensionError("apply: wrong row count");
  return A_.cast<cplx>() * X;
}

ComplexMatrix FirstOrderSystem::apply_transposed(const ComplexMatrix& X) const {
  if (X.rows() != order()) throw DimensionError("apply_transposed: wrong row count");
  return A_.cast<cplx>().transpose() * X;
}

std::shared_ptr<const ShiftedSolve> FirstOrderSystem::factorize(cplx sigma) const {
  return cache_->get(sigma, [this](cplx s) -> std::shared_ptr<const ShiftedSolve> {
    return abtl::factorize(A_, s);
  });
}

ComplexMatrix eval_transfer(const FirstOrderSystem& sys, cplx omega) {
  const auto lu = abtl::factorize(sys.state_matrix(), omega);
  return sys.output().cast<cplx>() * lu->solve(sys.input().cast<cplx>());
}

ComplexMatrix eval_transfer(const LinearSystem& sys, cplx omega) {
  if (const auto* first = dynamic_cast<const FirstOrderSystem*>(&sys)) {
    return eval_transfer(*first, omega);
  }
  const auto lu = sys.factorize(omega);
  return sys.output().cast<cplx>() * lu->solve(sys.input().cast<cplx>());
}

Eigen::PartialPivLU<ComplexMatrix> dense_resolvent(const ComplexMatrix& M, cplx omega) {
  if (M.rows() != M.cols()) throw DimensionError("resolvent of a non-square matrix");
  if (is_infinite(omega)) throw SingularShiftError(omega, "reduced resolvent");
  ComplexMatrix shifted = -M;
  shifted.diagonal().array() += omega;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = diag.size() ? diag.maxCoeff() : 0.0;
  const double smallest = diag.size() ? diag.minCoeff() : 0.0;
  if (!(largest > 0.0) || !(smallest > kPivotTolerance * largest) || !std::isfinite(largest)) {
    throw SingularShiftError(omega, "reduced resolvent");
  }
  return lu;
}

ComplexMatrix eval_reduced_transfer(const ReducedModel& rm, cplx omega) {
  if (rm.B.rows() != rm.order() || rm.C.cols() != rm.order()) {
    throw DimensionError("reduced model has inconsistent dimensions");
  }
  return rm.C * dense_resolvent(rm.A, omega).solve(rm.B);
}

ComplexMatrix moment(const LinearSystem& sys, cplx sigma, int i) {
  if (i < 0) throw Error(ErrorCode::invalid_argument, "moment index must be nonnegative");
  const auto lu = sys.factorize(sigma);
  ComplexMatrix X = lu->solve(sys.input().cast<cplx>());
  for (int k = 0; k < i; ++k) X = lu->solve(X);
  return sys.output().cast<cplx>() * X;
}

ComplexMatrix reduced_moment(const ReducedModel& rm, cplx sigma, int i) {
  if (i < 0) throw Error(ErrorCode::invalid_argument, "moment index must be nonnegative");
  const auto lu = dense_resolvent(rm.A, sigma);
  ComplexMatrix X = lu.solve(rm.B);
  for (int k = 0; k < i; ++k) X = lu.solve(X);
  return rm.C * X;
}

Matrix markov_parameter(const FirstOrderSystem& sys, int i) {
  if (i < 0) throw Error(ErrorCode::invalid_argument, "Markov parameter index must be nonnegative");
  Matrix X = sys.input();
  for (int k = 0; k < i; ++k) X = sys.state_matrix() * X;
  return sys.output() * X;
}

double spectral_norm(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues()(0);
}

}  // namespace abtl
