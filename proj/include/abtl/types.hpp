// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace abtl {

using Index = Eigen::Index;
using cplx = std::complex<double>;

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ComplexSparseMatrix = Eigen::SparseMatrix<cplx>;

/// Shift value standing for the point at infinity (Markov-parameter branch).
inline cplx infinite_shift() { return {std::numeric_limits<double>::infinity(), 0.0}; }
inline bool is_infinite(cplx shift) { return std::isinf(shift.real()) || std::isinf(shift.imag()); }

}  // namespace abtl
