// SPDX-License-Identifier: Apache-2.0
#include "abtl/btl.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "abtl/errors.hpp"

namespace abtl {

namespace {

struct OrthonormalBlock {
  ComplexMatrix basis;  // n x r, orthonormal columns
  ComplexMatrix coeff;  // r x k, block = basis * coeff
};

// Rank-revealing QR; columns whose pivot falls below rank_tol * reference are
// dropped.
OrthonormalBlock orthonormalize(const ComplexMatrix& block, double reference, double rank_tol) {
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(block);
  const ComplexMatrix R = qr.matrixR().template triangularView<Eigen::Upper>();
  const Index k = block.cols();
  const Index limit = std::min(block.rows(), k);
  Index rank = 0;
  while (rank < limit && std::abs(R(rank, rank)) > rank_tol * reference) ++rank;

  OrthonormalBlock out;
  out.basis = qr.householderQ() * ComplexMatrix::Identity(block.rows(), rank);
  ComplexMatrix upper = R.topRows(rank);
  out.coeff = upper * qr.colsPermutation().transpose();
  return out;
}

double max_column_norm(const ComplexMatrix& X) {
  return X.size() ? X.colwise().norm().maxCoeff() : 0.0;
}

void check_direction(const ComplexMatrix& D, Index p, const char* name) {
  if (D.rows() != p) throw DimensionError(std::string(name) + " must have p rows");
  if (D.cols() < 1 || D.cols() > p) throw DimensionError(std::string(name) + " must have 1..p columns");
}

ComplexMatrix right_block(const LinearSystem& sys, cplx sigma, const ComplexMatrix& R) {
  const ComplexMatrix BR = sys.input().cast<cplx>() * R;
  if (is_infinite(sigma)) return sys.apply(BR);
  return sys.factorize(sigma)->solve(BR);
}

// Infinite left shift uses A^T, the operator of the left Krylov space.
ComplexMatrix left_block(const LinearSystem& sys, cplx mu, const ComplexMatrix& L) {
  const ComplexMatrix CtL = sys.output().transpose().cast<cplx>() * L;
  if (is_infinite(mu)) return sys.apply_transposed(CtL);
  return sys.factorize(mu)->solve_transposed(CtL);
}

struct NewPair {
  ComplexMatrix V;  // n x r
  ComplexMatrix W;  // n x r
  ComplexMatrix H;  // r x s, new subdiagonal block
  ComplexMatrix F;  // r x s
};

// Steps 5-8 of a block step: QR of both residual blocks, SVD of W^T V and
// the symmetric Delta^{-1/2} scaling.
NewPair biorthonormalize(const ComplexMatrix& Vt, const ComplexMatrix& Wt, double ref_v,
                         double ref_w, std::size_t iteration, const BtlOptions& opt) {
  OrthonormalBlock qv = orthonormalize(Vt, ref_v, opt.rank_tol);
  OrthonormalBlock qw = orthonormalize(Wt, ref_w, opt.rank_tol);
  const Index rv = qv.basis.cols();
  const Index rw = qw.basis.cols();
  if (rv == 0 || rw == 0) {
    throw DeflationError(iteration, "new block lies in the span of the previous blocks");
  }

  // Unequal ranks keep the common rank through the dominant singular
  // triplets of W^T V.
  const Index r = std::min(rv, rw);
  const ComplexMatrix M = qw.basis.transpose() * qv.basis;
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector delta = svd.singularValues().head(r);
  const double ratio = delta(0) > 0.0 ? delta(r - 1) / delta(0) : 0.0;
  if (!(ratio >= opt.breakdown_tol)) throw BreakdownError(iteration, ratio);

  const Vector root = delta.cwiseSqrt();
  const Vector inv_root = root.cwiseInverse();
  const ComplexMatrix P = svd.matrixU().leftCols(r);
  const ComplexMatrix Qs = svd.matrixV().leftCols(r);

  NewPair out;
  out.V = qv.basis * Qs * inv_root.cast<cplx>().asDiagonal();
  out.W = qw.basis * P.conjugate() * inv_root.cast<cplx>().asDiagonal();
  out.H = root.cast<cplx>().asDiagonal() * Qs.adjoint() * qv.coeff;
  out.F = root.cast<cplx>().asDiagonal() * P.transpose() * qw.coeff;
  return out;
}

}  // namespace

Index ReductionState::block_offset(std::size_t j) const {
  if (j > widths_.size()) throw Error(ErrorCode::invalid_argument, "block index out of range");
  return std::accumulate(widths_.begin(), widths_.begin() + static_cast<std::ptrdiff_t>(j), Index{0});
}

ComplexMatrix ReductionState::h_block(std::size_t i, std::size_t j) const {
  const ComplexMatrix& col = right_coeffs_.at(j);
  const Index off = block_offset(i);
  if (off + block_width(i) > col.rows()) return ComplexMatrix::Zero(block_width(i), col.cols());
  return col.middleRows(off, block_width(i));
}

ComplexMatrix ReductionState::f_block(std::size_t i, std::size_t j) const {
  const ComplexMatrix& col = left_coeffs_.at(j);
  const Index off = block_offset(i);
  if (off + block_width(i) > col.rows()) return ComplexMatrix::Zero(block_width(i), col.cols());
  return col.middleRows(off, block_width(i));
}

bool ReductionState::deflated() const {
  return std::any_of(widths_.begin(), widths_.end(), [this](Index w) { return w != s_; });
}

ReductionState btl_init(const LinearSystem& sys, cplx sigma1, cplx mu1, const ComplexMatrix& R1,
                        const ComplexMatrix& L1, const BtlOptions& options) {
  const Index p = sys.ports();
  check_direction(R1, p, "R_1");
  check_direction(L1, p, "L_1");
  if (R1.cols() != L1.cols()) throw DimensionError("R_1 and L_1 must have the same width");

  const ComplexMatrix Vt = right_block(sys, sigma1, R1);
  const ComplexMatrix Wt = left_block(sys, mu1, L1);
  NewPair pair = biorthonormalize(Vt, Wt, max_column_norm(Vt), max_column_norm(Wt), 1, options);

  ReductionState state;
  state.s_ = R1.cols();
  state.V_ = std::move(pair.V);
  state.W_ = std::move(pair.W);
  state.widths_.push_back(state.V_.cols());
  state.right_coeffs_.push_back(std::move(pair.H));
  state.left_coeffs_.push_back(std::move(pair.F));
  state.sigma_.push_back(sigma1);
  state.mu_.push_back(mu1);
  state.R_.push_back(R1);
  state.L_.push_back(L1);
  return state;
}

void btl_extend(ReductionState& state, const LinearSystem& sys, cplx sigma, cplx mu,
                const ComplexMatrix& R, const ComplexMatrix& L, const BtlOptions& options) {
  if (state.iterations() == 0) throw Error(ErrorCode::invalid_argument, "extend requires an initialized state");
  const Index p = sys.ports();
  check_direction(R, p, "R");
  check_direction(L, p, "L");
  if (R.cols() != state.s_ || L.cols() != state.s_) {
    throw DimensionError("direction blocks must keep the width s of the first block");
  }
  const std::size_t iteration = state.iterations() + 1;

  ComplexMatrix Vt = right_block(sys, sigma, R);
  ComplexMatrix Wt = left_block(sys, mu, L);
  const double ref_v = max_column_norm(Vt);
  const double ref_w = max_column_norm(Wt);

  const Index k = state.V_.cols();
  ComplexMatrix h = ComplexMatrix::Zero(k, state.s_);
  ComplexMatrix f = ComplexMatrix::Zero(k, state.s_);
  const int passes = options.reorthogonalize ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    Index off = 0;
    for (const Index width : state.widths_) {
      const auto Vi = state.V_.middleCols(off, width);
      const auto Wi = state.W_.middleCols(off, width);
      const ComplexMatrix hij = Wi.transpose() * Vt;
      const ComplexMatrix fij = Vi.transpose() * Wt;
      Vt.noalias() -= Vi * hij;
      Wt.noalias() -= Wi * fij;
      h.middleRows(off, width) += hij;
      f.middleRows(off, width) += fij;
      off += width;
    }
  }

  NewPair pair = biorthonormalize(Vt, Wt, ref_v, ref_w, iteration, options);
  const Index r = pair.V.cols();

  ComplexMatrix hcol(k + r, state.s_);
  hcol << h, pair.H;
  ComplexMatrix fcol(k + r, state.s_);
  fcol << f, pair.F;

  ComplexMatrix V(state.V_.rows(), k + r);
  V << state.V_, pair.V;
  ComplexMatrix W(state.W_.rows(), k + r);
  W << state.W_, pair.W;

  state.V_ = std::move(V);
  state.W_ = std::move(W);
  state.widths_.push_back(r);
  state.right_coeffs_.push_back(std::move(hcol));
  state.left_coeffs_.push_back(std::move(fcol));
  state.sigma_.push_back(sigma);
  state.mu_.push_back(mu);
  state.R_.push_back(R);
  state.L_.push_back(L);
}

double condition_number(const ComplexMatrix& M) {
  if (M.rows() != M.cols() || M.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const Vector& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

HessenbergAssembly assemble(const ReductionState& state) {
  const std::size_t m = state.iterations();
  if (m == 0) throw Error(ErrorCode::invalid_argument, "assemble requires at least one iteration");
  const Index s = state.direction_width();
  const Index rows = state.columns();
  const Index cols = static_cast<Index>(m) * s;

  HessenbergAssembly out;
  out.G = ComplexMatrix::Zero(rows, cols);
  out.Q = ComplexMatrix::Zero(rows, cols);
  out.D1.resize(cols);
  out.D2.resize(cols);
  const Index p = state.directions_right().front().rows();
  out.R.resize(p, cols);
  out.L.resize(p, cols);
  for (std::size_t j = 0; j < m; ++j) {
    const Index c0 = static_cast<Index>(j) * s;
    const ComplexMatrix& h = state.right_coefficients(j);
    const ComplexMatrix& f = state.left_coefficients(j);
    out.G.block(0, c0, h.rows(), s) = h;
    out.Q.block(0, c0, f.rows(), s) = f;
    out.D1.segment(c0, s).setConstant(state.shifts_right()[j]);
    out.D2.segment(c0, s).setConstant(state.shifts_left()[j]);
    out.R.middleCols(c0, s) = state.directions_right()[j];
    out.L.middleCols(c0, s) = state.directions_left()[j];
  }
  out.cond_G = condition_number(out.G);
  out.cond_Q = condition_number(out.Q);
  return out;
}

ReducedModel project(const ReductionState& state, const LinearSystem& sys) {
  if (state.iterations() == 0) throw Error(ErrorCode::invalid_argument, "project requires at least one iteration");
  if (state.V().rows() != sys.order()) throw DimensionError("bases do not match the system order");
  ReducedModel rm;
  const ComplexMatrix AV = sys.apply(state.V());
  rm.A = state.W().transpose() * AV;
  rm.B = state.W().transpose() * sys.input().cast<cplx>();
  rm.C = sys.output().cast<cplx>() * state.V();
  rm.iterations = static_cast<Index>(state.iterations());
  rm.block_width = state.direction_width();
  return rm;
}

}  // namespace abtl
