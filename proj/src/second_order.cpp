// SPDX-License-Identifier: Apache-2.0
#include "abtl/second_order.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "abtl/errors.hpp"

namespace abtl {

namespace {

ComplexMatrix times(const SparseMatrix& A, const ComplexMatrix& X) {
  ComplexMatrix out(A.rows(), X.cols());
  out.real() = A * X.real();
  out.imag() = A * X.imag();
  return out;
}

ComplexMatrix times_transposed(const SparseMatrix& A, const ComplexMatrix& X) {
  ComplexMatrix out(A.cols(), X.cols());
  out.real() = A.transpose() * X.real();
  out.imag() = A.transpose() * X.imag();
  return out;
}

// Solves with (omega I - A) of the linearized system through the pencil.
class PencilSolve final : public ShiftedSolve {
 public:
  PencilSolve(const NormalizedSecondOrderSystem& sos, cplx omega)
      : sos_(sos), omega_(omega), lu_(sos.source().pencil(omega), omega) {}

  cplx shift() const override { return omega_; }
  Index size() const override { return 2 * sos_.order(); }

  ComplexMatrix solve(const ComplexMatrix& rhs) const override {
    const Index n = sos_.order();
    if (rhs.rows() != 2 * n) throw DimensionError("linearized solve: wrong row count");
    const auto R1 = rhs.topRows(n);
    const auto R2 = rhs.bottomRows(n);
    const ComplexMatrix lifted =
        sos_.mass_apply(R2 + omega_ * R1) + times(sos_.source().damping(), R1);
    ComplexMatrix X(2 * n, rhs.cols());
    X.topRows(n) = lu_.solve(lifted);
    X.bottomRows(n) = omega_ * X.topRows(n) - R1;
    return X;
  }

  ComplexMatrix solve_transposed(const ComplexMatrix& rhs) const override {
    const Index n = sos_.order();
    if (rhs.rows() != 2 * n) throw DimensionError("linearized solve: wrong row count");
    const auto S1 = rhs.topRows(n);
    const auto S2 = rhs.bottomRows(n);
    const ComplexMatrix Z = lu_.solve_transposed(S1 + omega_ * S2);
    ComplexMatrix Y(2 * n, rhs.cols());
    Y.bottomRows(n) = sos_.mass_apply_transposed(Z);
    Y.topRows(n) = omega_ * Y.bottomRows(n) + times_transposed(sos_.source().damping(), Z) - S2;
    return Y;
  }

 private:
  NormalizedSecondOrderSystem sos_;
  cplx omega_;
  ShiftedFactorization lu_;
};

}  // namespace

SecondOrderSystem::SecondOrderSystem(std::optional<SparseMatrix> M, SparseMatrix D, SparseMatrix K,
                                     Matrix B, Matrix C)
    : M_(std::move(M)), D_(std::move(D)), K_(std::move(K)), B_(std::move(B)), C_(std::move(C)) {
  const Index n = K_.rows();
  if (K_.cols() != n) throw DimensionError("K must be square");
  if (D_.rows() != n || D_.cols() != n) throw DimensionError("D must match K");
  if (M_ && (M_->rows() != n || M_->cols() != n)) throw DimensionError("M must match K");
  if (B_.rows() != n || B_.cols() < 1) throw DimensionError("B must be n x p with p >= 1");
  if (C_.cols() != n || C_.rows() != B_.cols()) throw DimensionError("C must be p x n");
  if (n < B_.cols()) throw DimensionError("order must be at least p");
  D_.makeCompressed();
  K_.makeCompressed();
  if (M_) M_->makeCompressed();
}

ComplexSparseMatrix SecondOrderSystem::pencil(cplx omega) const {
  ComplexSparseMatrix P = K_.cast<cplx>();
  P += omega * D_.cast<cplx>();
  if (M_) {
    P += (omega * omega) * M_->cast<cplx>();
  } else {
    ComplexSparseMatrix I(K_.rows(), K_.cols());
    I.setIdentity();
    P += (omega * omega) * I;
  }
  P.makeCompressed();
  return P;
}

ComplexMatrix NormalizedSecondOrderSystem::mass_solve(const ComplexMatrix& X) const {
  return mass_lu_ ? mass_lu_->solve(X) : X;
}

ComplexMatrix NormalizedSecondOrderSystem::mass_solve_transposed(const ComplexMatrix& X) const {
  return mass_lu_ ? mass_lu_->solve_transposed(X) : X;
}

ComplexMatrix NormalizedSecondOrderSystem::mass_apply(const ComplexMatrix& X) const {
  return mass_lu_ ? times(*source_.mass(), X) : X;
}

ComplexMatrix NormalizedSecondOrderSystem::mass_apply_transposed(const ComplexMatrix& X) const {
  return mass_lu_ ? times_transposed(*source_.mass(), X) : X;
}

ComplexMatrix NormalizedSecondOrderSystem::apply_damping(const ComplexMatrix& X) const {
  return mass_solve(times(source_.damping(), X));
}

ComplexMatrix NormalizedSecondOrderSystem::apply_stiffness(const ComplexMatrix& X) const {
  return mass_solve(times(source_.stiffness(), X));
}

ComplexMatrix NormalizedSecondOrderSystem::apply_damping_transposed(const ComplexMatrix& X) const {
  return times_transposed(source_.damping(), mass_solve_transposed(X));
}

ComplexMatrix NormalizedSecondOrderSystem::apply_stiffness_transposed(const ComplexMatrix& X) const {
  return times_transposed(source_.stiffness(), mass_solve_transposed(X));
}

Matrix NormalizedSecondOrderSystem::dense_damping() const {
  return mass_solve(Matrix(source_.damping()).cast<cplx>()).real();
}

Matrix NormalizedSecondOrderSystem::dense_stiffness() const {
  return mass_solve(Matrix(source_.stiffness()).cast<cplx>()).real();
}

NormalizedSecondOrderSystem normalize_mass(const SecondOrderSystem& sos) {
  NormalizedSecondOrderSystem out(sos);
  if (sos.mass()) {
    try {
      out.mass_lu_ = std::make_shared<const ShiftedFactorization>(
          ComplexSparseMatrix(sos.mass()->cast<cplx>()), cplx{0.0, 0.0});
    } catch (const SingularShiftError&) {
      throw Error(ErrorCode::singular_mass, "mass matrix is singular");
    }
    out.input_ = out.mass_lu_->solve(sos.input().cast<cplx>()).real();
  } else {
    out.input_ = sos.input();
  }
  return out;
}

ComplexMatrix eval_second_order_transfer(const SecondOrderSystem& sos, cplx omega) {
  if (is_infinite(omega)) throw SingularShiftError(omega, "quadratic pencil");
  const ShiftedFactorization lu(sos.pencil(omega), omega);
  return sos.output().cast<cplx>() * lu.solve(sos.input().cast<cplx>());
}

LinearizedSystem::LinearizedSystem(NormalizedSecondOrderSystem sos, std::size_t cache_capacity)
    : sos_(std::move(sos)), cache_(std::make_shared<SolverCache>(cache_capacity)) {
  const Index n = sos_.order();
  input_ = Matrix::Zero(2 * n, sos_.ports());
  input_.bottomRows(n) = sos_.input();
  output_ = Matrix::Zero(sos_.ports(), 2 * n);
  output_.leftCols(n) = sos_.output();
}

ComplexMatrix LinearizedSystem::apply(const ComplexMatrix& X) const {
  const Index n = sos_.order();
  if (X.rows() != 2 * n) throw DimensionError("apply: wrong row count");
  ComplexMatrix Y(2 * n, X.cols());
  Y.topRows(n) = X.bottomRows(n);
  Y.bottomRows(n) = -sos_.apply_stiffness(X.topRows(n)) - sos_.apply_damping(X.bottomRows(n));
  return Y;
}

ComplexMatrix LinearizedSystem::apply_transposed(const ComplexMatrix& X) const {
  const Index n = sos_.order();
  if (X.rows() != 2 * n) throw DimensionError("apply_transposed: wrong row count");
  ComplexMatrix Y(2 * n, X.cols());
  Y.topRows(n) = -sos_.apply_stiffness_transposed(X.bottomRows(n));
  Y.bottomRows(n) = X.topRows(n) - sos_.apply_damping_transposed(X.bottomRows(n));
  return Y;
}

std::shared_ptr<const ShiftedSolve> LinearizedSystem::factorize_uncached(cplx sigma) const {
  if (is_infinite(sigma)) throw SingularShiftError(sigma, "linearized factorization");
  return std::make_shared<const PencilSolve>(sos_, sigma);
}

std::shared_ptr<const ShiftedSolve> LinearizedSystem::factorize(cplx sigma) const {
  return cache_->get(sigma, [this](cplx s) { return factorize_uncached(s); });
}

Matrix LinearizedSystem::dense_state_matrix() const {
  const Index n = sos_.order();
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -sos_.dense_stiffness();
  A.bottomRightCorner(n, n) = -sos_.dense_damping();
  return A;
}

LinearizedSystem linearize(const NormalizedSecondOrderSystem& sos) { return LinearizedSystem(sos); }

ComplexMatrix eval_second_order_reduced(const SecondOrderReducedModel& rm, cplx omega) {
  if (is_infinite(omega)) throw SingularShiftError(omega, "reduced quadratic pencil");
  ComplexMatrix P = rm.K + omega * rm.D;
  P.diagonal().array() += omega * omega;
  return rm.C * dense_resolvent(-P, cplx{0.0, 0.0}).solve(rm.B);
}

ReducedModel BlockDiagonalProjection::linearized() const {
  const Index k = coupling.rows();
  const Index p = input.cols();
  ReducedModel rm;
  rm.A = ComplexMatrix::Zero(2 * k, 2 * k);
  rm.A.topRightCorner(k, k) = coupling;
  rm.A.bottomLeftCorner(k, k) = -stiffness;
  rm.A.bottomRightCorner(k, k) = -damping;
  rm.B = ComplexMatrix::Zero(2 * k, p);
  rm.B.bottomRows(k) = input;
  rm.C = ComplexMatrix::Zero(p, 2 * k);
  rm.C.leftCols(k) = output;
  return rm;
}

SecondOrderReducedModel BlockDiagonalProjection::second_order() const {
  const double cond = condition_number(coupling);
  if (!(cond < kMaxStructureCondition)) {
    throw Error(ErrorCode::structure_loss,
                "coupling block W1^T V2 is numerically singular (condition " + std::to_string(cond) + ")");
  }
  SecondOrderReducedModel out;
  // T D_hat T^{-1} = (T^{-T} (T D_hat)^T)^T
  const ComplexMatrix TD = coupling * damping;
  out.D = coupling.transpose().partialPivLu().solve(TD.transpose()).transpose();
  out.K = coupling * stiffness;
  out.B = coupling * input;
  out.C = output;
  return out;
}

BlockDiagonalProjection project_block_diagonal(const NormalizedSecondOrderSystem& sos,
                                               const ComplexMatrix& V1, const ComplexMatrix& V2,
                                               const ComplexMatrix& W1, const ComplexMatrix& W2) {
  const Index n = sos.order();
  if (V1.rows() != n || V2.rows() != n || W1.rows() != n || W2.rows() != n) {
    throw DimensionError("half bases must have n rows");
  }
  if (V1.cols() != V2.cols() || W1.cols() != V1.cols() || W2.cols() != V1.cols()) {
    throw DimensionError("half bases must have equal widths");
  }
  const ComplexMatrix Z = sos.mass_solve_transposed(W2);  // M^{-T} W2
  BlockDiagonalProjection out;
  out.coupling = W1.transpose() * V2;
  out.damping = times_transposed(sos.source().damping(), Z).transpose() * V2;
  out.stiffness = times_transposed(sos.source().stiffness(), Z).transpose() * V1;
  out.input = Z.transpose() * sos.source().input().cast<cplx>();
  out.output = sos.output().cast<cplx>() * V1;
  return out;
}

namespace {

// Orthonormal basis of range(X) by column-pivoted QR; throws on rank loss.
ComplexMatrix orthonormal_range(const ComplexMatrix& X) {
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(X);
  const ComplexMatrix R = qr.matrixR().template triangularView<Eigen::Upper>();
  const Index k = X.cols();
  if (k > X.rows() || !(std::abs(R(k - 1, k - 1)) > kHalfBasisRankTol * std::abs(R(0, 0)))) {
    throw Error(ErrorCode::structure_loss, "half bases are rank-deficient");
  }
  return qr.householderQ() * ComplexMatrix::Identity(X.rows(), k);
}

}  // namespace

void biorthonormalize_pair(ComplexMatrix& V, ComplexMatrix& W) {
  if (V.rows() != W.rows() || V.cols() != W.cols()) throw DimensionError("bases must have equal shapes");
  if (V.cols() == 0) throw Error(ErrorCode::structure_loss, "half bases are empty");
  const ComplexMatrix Qv = orthonormal_range(V);
  const ComplexMatrix Qw = orthonormal_range(W);
  const ComplexMatrix M = Qw.transpose() * Qv;
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& delta = svd.singularValues();
  if (!(delta(delta.size() - 1) > delta(0) / kMaxStructureCondition)) {
    throw Error(ErrorCode::structure_loss, "half bases have numerically singular W^T V");
  }
  const Vector inv_root = delta.cwiseSqrt().cwiseInverse();
  V = Qv * svd.matrixV() * inv_root.cast<cplx>().asDiagonal();
  W = Qw * svd.matrixU().conjugate() * inv_root.cast<cplx>().asDiagonal();
}

SecondOrderReduction reduce_second_order(const SecondOrderSystem& sos, const AbtlOptions& options,
                                         const IterationObserver& observer) {
  const NormalizedSecondOrderSystem normalized = normalize_mass(sos);
  const LinearizedSystem linear(normalized);

  SecondOrderReduction out;
  out.run = run_abtl(linear, options, observer);
  const Index n = sos.order();
  const ComplexMatrix& V = out.run.state.V();
  const ComplexMatrix& W = out.run.state.W();
  if (V.cols() > n) {
    throw Error(ErrorCode::structure_loss, "reduced order exceeds the number of degrees of freedom");
  }
  out.V1 = V.topRows(n);
  out.V2 = V.bottomRows(n);
  out.W1 = W.topRows(n);
  out.W2 = W.bottomRows(n);
  biorthonormalize_pair(out.V1, out.W1);
  biorthonormalize_pair(out.V2, out.W2);

  out.projection = project_block_diagonal(normalized, out.V1, out.V2, out.W1, out.W2);
  out.coupling_condition = condition_number(out.projection.coupling);
  out.model = out.projection.second_order();
  out.model.iterations = out.run.model.iterations;
  out.model.block_width = out.run.model.block_width;
  return out;
}

}  // namespace abtl
