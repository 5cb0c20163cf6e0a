// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "abtl/system.hpp"

namespace abtl {

struct BtlOptions {
  /// Breakdown when the smallest singular value of W^T V of a new block pair
  /// drops below this fraction of the largest.
  double breakdown_tol = 1e-12;
  /// Column-rank threshold of a new block, relative to the block's norm
  /// before orthogonalization.
  double rank_tol = 1e-12;
  /// Second two-sided Gram-Schmidt sweep over all previous blocks.
  bool reorthogonalize = true;
};

/// Growing biorthonormal bases W^T V = I of the right and left block
/// tangential Krylov subspaces together with the recurrence coefficients.
///
/// Block j (0-based) of V has width block_width(j) <= s. The right
/// coefficients of step j satisfy
///   V[:, 0:offset(j+1)] * right_coefficients(j) = T_j,
/// where T_j is the solved block (sigma_j I - A)^{-1} B R_j (or A B R_j for
/// an infinite shift); the left ones mirror this with W, mu_j, C^T, L_j.
/// For j = 0 the column is the single block H_{1,0}.
class ReductionState {
 public:
  const ComplexMatrix& V() const { return V_; }
  const ComplexMatrix& W() const { return W_; }
  std::size_t iterations() const { return right_coeffs_.size(); }
  Index columns() const { return V_.cols(); }
  Index block_width(std::size_t j) const { return widths_.at(j); }
  Index block_offset(std::size_t j) const;
  /// Columns of each direction block (s).
  Index direction_width() const { return s_; }

  const ComplexMatrix& right_coefficients(std::size_t j) const { return right_coeffs_.at(j); }
  const ComplexMatrix& left_coefficients(std::size_t j) const { return left_coeffs_.at(j); }
  /// s x s block H_{i,j} in 0-based block indices (row block i of step j).
  ComplexMatrix h_block(std::size_t i, std::size_t j) const;
  ComplexMatrix f_block(std::size_t i, std::size_t j) const;

  const std::vector<cplx>& shifts_right() const { return sigma_; }
  const std::vector<cplx>& shifts_left() const { return mu_; }
  const std::vector<ComplexMatrix>& directions_right() const { return R_; }
  const std::vector<ComplexMatrix>& directions_left() const { return L_; }
  bool deflated() const;

 private:
  friend ReductionState btl_init(const LinearSystem&, cplx, cplx, const ComplexMatrix&,
                                 const ComplexMatrix&, const BtlOptions&);
  friend void btl_extend(ReductionState&, const LinearSystem&, cplx, cplx, const ComplexMatrix&,
                         const ComplexMatrix&, const BtlOptions&);

  ComplexMatrix V_;
  ComplexMatrix W_;
  Index s_ = 0;
  std::vector<Index> widths_;
  std::vector<ComplexMatrix> right_coeffs_;
  std::vector<ComplexMatrix> left_coeffs_;
  std::vector<cplx> sigma_;
  std::vector<cplx> mu_;
  std::vector<ComplexMatrix> R_;
  std::vector<ComplexMatrix> L_;
};

/// First block pair: V_1 H_{1,0} = (sigma_1 I - A)^{-1} B R_1 and
/// W_1 F_{1,0} = (mu_1 I - A)^{-T} C^T L_1 with W_1^T V_1 = I.
ReductionState btl_init(const LinearSystem& sys, cplx sigma1, cplx mu1, const ComplexMatrix& R1,
                        const ComplexMatrix& L1, const BtlOptions& options = {});

/// Appends one block pair. Strong exception guarantee: on breakdown or
/// deflation failure the state is left untouched.
void btl_extend(ReductionState& state, const LinearSystem& sys, cplx sigma, cplx mu,
                const ComplexMatrix& R, const ComplexMatrix& L, const BtlOptions& options = {});

/// Block upper triangular coefficient matrices and shift diagonals.
struct HessenbergAssembly {
  ComplexMatrix G;    // columns() x (m s), right coefficients
  ComplexMatrix Q;    // columns() x (m s), left coefficients
  ComplexVector D1;   // diag(sigma_1..sigma_m) kron I_s
  ComplexVector D2;   // diag(mu_1..mu_m) kron I_s
  ComplexMatrix R;    // [R_1 ... R_m], p x (m s)
  ComplexMatrix L;    // [L_1 ... L_m], p x (m s)
  double cond_G = 0;  // 2-norm condition numbers (inf when not square)
  double cond_Q = 0;

  static constexpr double kConditionWarning = 1e14;
  bool square() const { return G.rows() == G.cols(); }
  bool ill_conditioned() const {
    return !(cond_G < kConditionWarning) || !(cond_Q < kConditionWarning);
  }
};

HessenbergAssembly assemble(const ReductionState& state);

/// A_m = W^T A V, B_m = W^T B, C_m = C V.
ReducedModel project(const ReductionState& state, const LinearSystem& sys);

/// 2-norm condition number by SVD; infinity for singular or non-square input.
double condition_number(const ComplexMatrix& M);

}  // namespace abtl
