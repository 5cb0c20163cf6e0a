// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "abtl/adaptive.hpp"
#include "abtl/system.hpp"

namespace abtl {

/// M q'' + D q' + K q = B u, y = C q. An absent M means the identity.
class SecondOrderSystem {
 public:
  SecondOrderSystem(std::optional<SparseMatrix> M, SparseMatrix D, SparseMatrix K, Matrix B, Matrix C);

  Index order() const { return K_.rows(); }
  Index ports() const { return B_.cols(); }
  const std::optional<SparseMatrix>& mass() const { return M_; }
  const SparseMatrix& damping() const { return D_; }
  const SparseMatrix& stiffness() const { return K_; }
  const Matrix& input() const { return B_; }
  const Matrix& output() const { return C_; }

  /// omega^2 M + omega D + K.
  ComplexSparseMatrix pencil(cplx omega) const;

 private:
  std::optional<SparseMatrix> M_;
  SparseMatrix D_;
  SparseMatrix K_;
  Matrix B_;
  Matrix C_;
};

/// The M = I form q'' + M^{-1}D q' + M^{-1}K q = M^{-1}B u. The M^{-1}
/// products are applied through a stored factorization of M.
class NormalizedSecondOrderSystem {
 public:
  Index order() const { return source_.order(); }
  Index ports() const { return source_.ports(); }
  const SecondOrderSystem& source() const { return source_; }
  bool identity_mass() const { return !mass_lu_; }

  /// B_M = M^{-1} B.
  const Matrix& input() const { return input_; }
  const Matrix& output() const { return source_.output(); }

  ComplexMatrix mass_solve(const ComplexMatrix& X) const;             // M^{-1} X
  ComplexMatrix mass_solve_transposed(const ComplexMatrix& X) const;  // M^{-T} X
  ComplexMatrix mass_apply(const ComplexMatrix& X) const;             // M X
  ComplexMatrix mass_apply_transposed(const ComplexMatrix& X) const;  // M^T X
  ComplexMatrix apply_damping(const ComplexMatrix& X) const;          // M^{-1} D X
  ComplexMatrix apply_stiffness(const ComplexMatrix& X) const;        // M^{-1} K X
  ComplexMatrix apply_damping_transposed(const ComplexMatrix& X) const;    // D^T M^{-T} X
  ComplexMatrix apply_stiffness_transposed(const ComplexMatrix& X) const;  // K^T M^{-T} X

  /// Dense D_M, K_M; intended for small systems and checks.
  Matrix dense_damping() const;
  Matrix dense_stiffness() const;

 private:
  friend NormalizedSecondOrderSystem normalize_mass(const SecondOrderSystem&);
  explicit NormalizedSecondOrderSystem(const SecondOrderSystem& source) : source_(source) {}

  SecondOrderSystem source_;
  std::shared_ptr<const ShiftedFactorization> mass_lu_;
  Matrix input_;
};

/// Raises ErrorCode::singular_mass when M fails the pivot test.
NormalizedSecondOrderSystem normalize_mass(const SecondOrderSystem& sos);

/// F(omega) = C (omega^2 M + omega D + K)^{-1} B by one sparse solve.
ComplexMatrix eval_second_order_transfer(const SecondOrderSystem& sos, cplx omega);

/// First-order form of dimension 2n with
///   A = [0 I; -K_M -D_M], B = [0; B_M], C = [C 0],
/// applied implicitly. A shifted solve with (omega I - A) costs one
/// factorization of omega^2 M + omega D + K plus block back-substitution.
class LinearizedSystem final : public LinearSystem {
 public:
  explicit LinearizedSystem(NormalizedSecondOrderSystem sos,
                            std::size_t cache_capacity = SolverCache::kDefaultCapacity);

  Index order() const override { return 2 * sos_.order(); }
  const Matrix& input() const override { return input_; }
  const Matrix& output() const override { return output_; }
  const NormalizedSecondOrderSystem& second_order() const { return sos_; }

  ComplexMatrix apply(const ComplexMatrix& X) const override;
  ComplexMatrix apply_transposed(const ComplexMatrix& X) const override;
  std::shared_ptr<const ShiftedSolve> factorize(cplx sigma) const override;

  /// Uncached factorization.
  std::shared_ptr<const ShiftedSolve> factorize_uncached(cplx sigma) const;

  /// Explicit dense 2n x 2n state matrix, for small systems and checks.
  Matrix dense_state_matrix() const;

 private:
  NormalizedSecondOrderSystem sos_;
  Matrix input_;
  Matrix output_;
  std::shared_ptr<SolverCache> cache_;
};

LinearizedSystem linearize(const NormalizedSecondOrderSystem& sos);

/// Reduced second-order model q'' + D_m q' + K_m q = B_m u, y = C_m q.
struct SecondOrderReducedModel {
  ComplexMatrix D;
  ComplexMatrix K;
  ComplexMatrix B;
  ComplexMatrix C;
  Index iterations = 0;
  Index block_width = 0;

  Index order() const { return K.rows(); }
  Index ports() const { return B.cols(); }
};

/// C_m (omega^2 I + omega D_m + K_m)^{-1} B_m.
ComplexMatrix eval_second_order_reduced(const SecondOrderReducedModel& rm, cplx omega);

/// Block-diagonal projection diag(W1, W2)^T A diag(V1, V2) of the linearized
/// system, which has the pattern [0 T; -K_hat -D_hat].
struct BlockDiagonalProjection {
  ComplexMatrix coupling;   // T = W1^T V2
  ComplexMatrix damping;    // D_hat = W2^T M^{-1} D V2
  ComplexMatrix stiffness;  // K_hat = W2^T M^{-1} K V1
  ComplexMatrix input;      // B_hat = W2^T M^{-1} B
  ComplexMatrix output;     // C_hat = C V1

  /// The 2k-dimensional first-order reduced model.
  ReducedModel linearized() const;
  /// Second-order form obtained with q = z1: D_m = T D_hat T^{-1},
  /// K_m = T K_hat, B_m = T B_hat, C_m = C_hat. Raises
  /// ErrorCode::structure_loss when T is numerically singular.
  SecondOrderReducedModel second_order() const;
};

/// Maximum condition number accepted for the coupling block and half bases.
inline constexpr double kMaxStructureCondition = 1e12;
/// Relative pivot below which a half basis counts as rank-deficient.
inline constexpr double kHalfBasisRankTol = 1e-13;

BlockDiagonalProjection project_block_diagonal(const NormalizedSecondOrderSystem& sos,
                                               const ComplexMatrix& V1, const ComplexMatrix& V2,
                                               const ComplexMatrix& W1, const ComplexMatrix& W2);

/// Replaces (V, W) by bases of the same ranges with W^T V = I: orthonormal
/// ranges by pivoted QR, then the SVD scaling of their cross product. Raises
/// ErrorCode::structure_loss on rank loss or numerically singular W^T V.
void biorthonormalize_pair(ComplexMatrix& V, ComplexMatrix& W);

struct SecondOrderReduction {
  SecondOrderReducedModel model;
  BlockDiagonalProjection projection;
  AbtlResult run;  // reduction of the linearized system
  ComplexMatrix V1, V2, W1, W2;
  double coupling_condition = 0.0;
};

/// ABTL on the linearized system, split of the bases into position and
/// velocity halves, independent biorthonormalization of each half, and
/// block-diagonal projection.
SecondOrderReduction reduce_second_order(const SecondOrderSystem& sos, const AbtlOptions& options,
                                         const IterationObserver& observer = {});

}  // namespace abtl
