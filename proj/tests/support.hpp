// SPDX-License-Identifier: Apache-2.0
// Test systems and dense reference evaluations, written against Eigen only.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "abtl/second_order.hpp"
#include "abtl/system.hpp"

namespace testing {

using abtl::cplx;
using abtl::ComplexMatrix;
using abtl::Index;
using abtl::Matrix;
using abtl::SparseMatrix;

inline SparseMatrix to_sparse(const Matrix& D) { return D.sparseView(); }

/// Sparse nonsymmetric A, strictly diagonally dominant with a negative
/// diagonal so every eigenvalue has real part <= -1.
inline SparseMatrix random_stable_matrix(Index n, std::uint64_t seed, int per_row = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> col(0, n - 1);
  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i) {
    for (int k = 0; k < per_row; ++k) {
      const Index j = col(rng);
      if (j == i) continue;
      const double v = normal(rng);
      t.emplace_back(i, j, v);
      row_sum[static_cast<std::size_t>(i)] += std::abs(v);
    }
  }
  std::uniform_real_distribution<double> extra(1.0, 3.0);
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, -(row_sum[static_cast<std::size_t>(i)] + extra(rng)));
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

inline Matrix random_dense(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = u(rng);
  return M;
}

inline abtl::FirstOrderSystem random_system(Index n, Index p, std::uint64_t seed) {
  return abtl::FirstOrderSystem(random_stable_matrix(n, seed), random_dense(n, p, seed + 1),
                                random_dense(p, n, seed + 2));
}

/// C (w I - A)^{-1} B with a dense full-pivot LU.
inline ComplexMatrix dense_transfer(const Matrix& A, const Matrix& B, const Matrix& C, cplx w) {
  const Index n = A.rows();
  const ComplexMatrix P = w * ComplexMatrix::Identity(n, n) - A.cast<cplx>();
  return C.cast<cplx>() * P.fullPivLu().solve(B.cast<cplx>());
}

inline ComplexMatrix dense_transfer(const abtl::FirstOrderSystem& sys, cplx w) {
  return dense_transfer(Matrix(sys.state_matrix()), sys.input(), sys.output(), w);
}

/// C (w^2 M + w D + K)^{-1} B, dense.
inline ComplexMatrix dense_second_order_transfer(const Matrix& M, const Matrix& D, const Matrix& K,
                                                 const Matrix& B, const Matrix& C, cplx w) {
  const ComplexMatrix P = (w * w) * M.cast<cplx>() + w * D.cast<cplx>() + K.cast<cplx>();
  return C.cast<cplx>() * P.fullPivLu().solve(B.cast<cplx>());
}

/// 1D beam-like chain: consistent mass tridiag(1, 4, 1)/6, stiffness
/// tridiag(-1, 2, -1) scaled by k, Rayleigh damping a M + b K.
inline abtl::SecondOrderSystem beam_surrogate(Index n, Index p, std::uint64_t seed, bool with_mass = true) {
  std::vector<Eigen::Triplet<double>> tm, tk;
  const double k = 1e3;
  for (Index i = 0; i < n; ++i) {
    tm.emplace_back(i, i, 4.0 / 6.0);
    tk.emplace_back(i, i, 2.0 * k);
    if (i + 1 < n) {
      tm.emplace_back(i, i + 1, 1.0 / 6.0);
      tm.emplace_back(i + 1, i, 1.0 / 6.0);
      tk.emplace_back(i, i + 1, -k);
      tk.emplace_back(i + 1, i, -k);
    }
  }
  SparseMatrix M(n, n), K(n, n);
  M.setFromTriplets(tm.begin(), tm.end());
  K.setFromTriplets(tk.begin(), tk.end());
  SparseMatrix D = 0.05 * M + 2e-4 * K;
  std::optional<SparseMatrix> mass;
  if (with_mass) mass = M;
  else D = 0.05 * SparseMatrix(Matrix::Identity(n, n).sparseView()) + 2e-4 * K;
  return abtl::SecondOrderSystem(mass, D, K, random_dense(n, p, seed), random_dense(p, n, seed + 1));
}

inline double rel(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

inline std::vector<double> log_points(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(hi / lo, double(k) / (count - 1)));
  return out;
}

}  // namespace testing
