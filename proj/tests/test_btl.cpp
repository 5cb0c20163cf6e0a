// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "abtl/btl.hpp"
#include "abtl/errors.hpp"
#include "abtl/problems_io.hpp"
#include "support.hpp"

using namespace abtl;

namespace {

ComplexMatrix unit_columns(Index p, std::initializer_list<Index> cols) {
  ComplexMatrix E = ComplexMatrix::Zero(p, static_cast<Index>(cols.size()));
  Index k = 0;
  for (Index c : cols) E(c, k++) = 1.0;
  return E;
}

ComplexMatrix orthonormal(Index p, Index s, std::uint64_t seed) {
  const ComplexMatrix X = testing::random_dense(p, s, seed).cast<cplx>() +
                          cplx(0, 1) * testing::random_dense(p, s, seed + 7).cast<cplx>();
  Eigen::HouseholderQR<ComplexMatrix> qr(X);
  return qr.householderQ() * ComplexMatrix::Identity(p, s);
}

// Fixed shifts and random directions, m steps.
ReductionState build(const LinearSystem& sys, Index s, const std::vector<cplx>& sigma, const std::vector<cplx>& mu,
                     std::uint64_t seed) {
  const Index p = sys.ports();
  ReductionState st = btl_init(sys, sigma[0], mu[0], orthonormal(p, s, seed), orthonormal(p, s, seed + 1));
  for (std::size_t j = 1; j < sigma.size(); ++j) {
    btl_extend(st, sys, sigma[j], mu[j], orthonormal(p, s, seed + 2 * j), orthonormal(p, s, seed + 2 * j + 1));
  }
  return st;
}

double biorth(const ReductionState& st) {
  const Index k = st.columns();
  return (st.W().transpose() * st.V() - ComplexMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("scalar initialization") {
  const FirstOrderSystem sys(testing::to_sparse(Matrix::Constant(1, 1, -1.0)), Matrix::Ones(1, 1),
                             Matrix::Ones(1, 1));
  const ComplexMatrix one = ComplexMatrix::Ones(1, 1);
  const auto st = btl_init(sys, 1.0, 1.0, one, one);
  CHECK(std::abs(std::abs(st.V()(0, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(st.W()(0, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(st.h_block(0, 0)(0, 0)) - 0.5) < 1e-15);
  CHECK(std::abs(st.f_block(0, 0)(0, 0)) == doctest::Approx(0.5));
}

TEST_CASE("symmetric system with matching data gives V = W up to signs") {
  const Matrix R = testing::random_dense(10, 10, 3);
  const Matrix S = -(R + R.transpose()) - 20.0 * Matrix::Identity(10, 10);
  const Matrix B = testing::random_dense(10, 2, 4);
  const FirstOrderSystem sys(testing::to_sparse(S), B, B.transpose());
  auto st = btl_init(sys, 2.0, 2.0, unit_columns(2, {0}), unit_columns(2, {0}));
  btl_extend(st, sys, 5.0, 5.0, unit_columns(2, {1}), unit_columns(2, {1}));
  for (Index j = 0; j < st.columns(); ++j) {
    const double plus = (st.V().col(j) - st.W().col(j)).norm();
    const double minus = (st.V().col(j) + st.W().col(j)).norm();
    CHECK(std::min(plus, minus) < 1e-12);
  }
}

TEST_CASE("FDM first block is biorthonormal") {
  FdmSpec spec;
  spec.n0 = 20;
  const auto sys = generate_fdm(spec);
  const auto st = btl_init(sys, 1.0, 1.0, orthonormal(6, 3, 1), orthonormal(6, 3, 2));
  CHECK(st.columns() == 3);
  CHECK(biorth(st) <= 1e-12);
}

TEST_CASE("biorthogonality and Arnoldi-like relations") {
  const auto sys = testing::random_system(12, 1, 5);
  const auto st = build(sys, 1, {{1.0, 0}, {2.0, 3.0}, {0.5, -1.0}}, {{1.5, 0}, {3.0, 1.0}, {0.2, 4.0}}, 9);
  CHECK(biorth(st) <= 1e-10);

  const auto as = assemble(st);
  REQUIRE(as.square());
  const ComplexMatrix A = Matrix(sys.state_matrix()).cast<cplx>();
  const ComplexMatrix B = sys.input().cast<cplx>();
  const ComplexMatrix Ct = sys.output().transpose().cast<cplx>();

  const ComplexMatrix VG = st.V() * as.G;
  const ComplexMatrix lhs = A * VG;
  CHECK((lhs - (VG * as.D1.asDiagonal() - B * as.R)).norm() / lhs.norm() <= 1e-10);

  const ComplexMatrix WQ = st.W() * as.Q;
  const ComplexMatrix lhs_t = A.transpose() * WQ;
  CHECK((lhs_t - (WQ * as.D2.asDiagonal() - Ct * as.L)).norm() / lhs_t.norm() <= 1e-10);

  // V G stacks the solved blocks.
  for (std::size_t j = 0; j < st.iterations(); ++j) {
    const Index n = sys.order();
    const ComplexMatrix P = st.shifts_right()[j] * ComplexMatrix::Identity(n, n) - A;
    const ComplexMatrix T = P.fullPivLu().solve(B * st.directions_right()[j]);
    CHECK(testing::rel(VG.col(static_cast<Index>(j)), T) <= 1e-10);
  }
}

TEST_CASE("block structure of the assembled coefficients") {
  const auto sys = testing::random_system(30, 3, 6);
  const auto st = build(sys, 2, {{1.0, 0}, {2.0, 1.0}, {4.0, -2.0}}, {{1.0, 0}, {3.0, 0}, {0.5, 5.0}}, 2);
  const auto as = assemble(st);
  CHECK(as.G.rows() == 6);
  CHECK(as.G.cols() == 6);
  for (Index bj = 0; bj < 3; ++bj)
    for (Index bi = bj + 1; bi < 3; ++bi) {
      CHECK(as.G.block(2 * bi, 2 * bj, 2, 2).norm() == 0.0);
      CHECK(as.Q.block(2 * bi, 2 * bj, 2, 2).norm() == 0.0);
    }
  CHECK(as.D1(4) == cplx(4.0, -2.0));
  CHECK(as.D2(5) == cplx(0.5, 5.0));
  CHECK(as.cond_G < HessenbergAssembly::kConditionWarning);
}

TEST_CASE("single scalar step assembles to H_{1,0}") {
  const auto sys = testing::random_system(5, 1, 8);
  const auto st = btl_init(sys, 1.0, 1.0, unit_columns(1, {0}), unit_columns(1, {0}));
  const auto as = assemble(st);
  CHECK(as.G.rows() == 1);
  CHECK(as.G(0, 0) == st.h_block(0, 0)(0, 0));
}

TEST_CASE("solved blocks lie in the right and left spaces") {
  const auto sys = testing::random_system(40, 2, 12);
  const std::vector<cplx> sigma{{1.0, 0}, {0.3, 2.0}, {5.0, 0.0}, {1.0, 9.0}};
  const std::vector<cplx> mu{{2.0, 0}, {1.0, -1.0}, {0.7, 0.0}, {3.0, 3.0}};
  const auto st = build(sys, 2, sigma, mu, 4);
  CHECK(biorth(st) <= 1e-10);
  const Index n = sys.order();
  const ComplexMatrix A = Matrix(sys.state_matrix()).cast<cplx>();
  const ComplexMatrix Vo = st.V().householderQr().householderQ() * ComplexMatrix::Identity(n, st.columns());
  const ComplexMatrix Wo = st.W().householderQr().householderQ() * ComplexMatrix::Identity(n, st.columns());
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const ComplexMatrix T = (sigma[j] * ComplexMatrix::Identity(n, n) - A)
                                .fullPivLu()
                                .solve(sys.input().cast<cplx>() * st.directions_right()[j]);
    CHECK((T - Vo * (Vo.adjoint() * T)).norm() <= 1e-10 * T.norm());
    const ComplexMatrix S = (mu[j] * ComplexMatrix::Identity(n, n) - A)
                                .transpose()
                                .fullPivLu()
                                .solve(sys.output().transpose().cast<cplx>() * st.directions_left()[j]);
    CHECK((S - Wo * (Wo.adjoint() * S)).norm() <= 1e-10 * S.norm());
  }
}

TEST_CASE("infinite shift uses the operator itself") {
  const auto sys = testing::random_system(20, 1, 13);
  const ComplexMatrix e = unit_columns(1, {0});
  auto st = btl_init(sys, 1.0, 1.0, e, e);
  btl_extend(st, sys, infinite_shift(), infinite_shift(), e, e);
  const ComplexMatrix A = Matrix(sys.state_matrix()).cast<cplx>();
  const ComplexMatrix AB = A * sys.input().cast<cplx>();
  const ComplexMatrix AtC = A.transpose() * sys.output().transpose().cast<cplx>();
  const Index n = sys.order();
  const ComplexMatrix Vo = st.V().householderQr().householderQ() * ComplexMatrix::Identity(n, 2);
  const ComplexMatrix Wo = st.W().householderQr().householderQ() * ComplexMatrix::Identity(n, 2);
  CHECK((AB - Vo * (Vo.adjoint() * AB)).norm() <= 1e-10 * AB.norm());
  CHECK((AtC - Wo * (Wo.adjoint() * AtC)).norm() <= 1e-10 * AtC.norm());
  CHECK(biorth(st) <= 1e-10);
}

TEST_CASE("breakdown when the first blocks are W-orthogonal") {
  const Matrix B = (Matrix(2, 1) << 1, 0).finished();
  const Matrix C = (Matrix(1, 2) << 0, 1).finished();
  const FirstOrderSystem sys(testing::to_sparse(-Matrix::Identity(2, 2)), B, C);
  const ComplexMatrix e = unit_columns(1, {0});
  CHECK_THROWS_AS(btl_init(sys, 1.0, 1.0, e, e), BreakdownError);
  try {
    btl_init(sys, 1.0, 1.0, e, e);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::breakdown);
  }
}

TEST_CASE("repeating a step deflates and leaves the state untouched") {
  const auto sys = testing::random_system(15, 2, 14);
  const ComplexMatrix R = orthonormal(2, 2, 3);
  auto st = btl_init(sys, 1.0, 1.0, R, R);
  const ComplexMatrix V = st.V();
  CHECK_THROWS_AS(btl_extend(st, sys, 1.0, 1.0, R, R), DeflationError);
  CHECK(st.iterations() == 1);
  CHECK(st.V() == V);
}

TEST_CASE("partial rank loss shrinks the block") {
  // (sigma I - A)^{-1} e_5 stays parallel to e_5 for diagonal A.
  const Index n = 6;
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) A(i, i) = -1.0 - i;
  Matrix B(n, 2);
  B.col(0) = testing::random_dense(n, 1, 3);
  B.col(1) = Matrix::Identity(n, n).col(5);
  const FirstOrderSystem sys(testing::to_sparse(A), B, B.transpose());
  const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
  auto st = btl_init(sys, 1.0, 1.0, I2, I2);
  btl_extend(st, sys, 2.0, 2.0, I2, I2);
  CHECK(st.block_width(0) == 2);
  CHECK(st.block_width(1) == 1);
  CHECK(st.deflated());
  CHECK(st.directions_right()[1].cols() == 2);
  CHECK(biorth(st) <= 1e-10);
}

TEST_CASE("projection with identity bases is a principal submatrix") {
  const auto sys = testing::random_system(6, 1, 16);
  // Full-dimension bases reproduce the transfer function.
  ReductionState st = btl_init(sys, 1.0, 1.0, unit_columns(1, {0}), unit_columns(1, {0}));
  const std::vector<cplx> shifts{2.0, 3.0, 4.0, 5.0, 6.0};
  for (cplx s : shifts) btl_extend(st, sys, s, s + 0.5, unit_columns(1, {0}), unit_columns(1, {0}));
  REQUIRE(st.columns() == 6);
  const auto rm = project(st, sys);
  for (cplx w : {cplx(0, 1), cplx(2, -3), cplx(0.1, 0)}) {
    CHECK(testing::rel(eval_reduced_transfer(rm, w), testing::dense_transfer(sys, w)) <= 1e-9);
  }
  const ComplexMatrix A = Matrix(sys.state_matrix()).cast<cplx>();
  CHECK(testing::rel(rm.A, st.W().transpose() * A * st.V()) <= 1e-14);
}

TEST_CASE("direction validation") {
  const auto sys = testing::random_system(8, 2, 17);
  CHECK_THROWS_AS(btl_init(sys, 1.0, 1.0, ComplexMatrix::Identity(3, 1), ComplexMatrix::Identity(2, 1)),
                  DimensionError);
  auto st = btl_init(sys, 1.0, 1.0, ComplexMatrix::Identity(2, 1), ComplexMatrix::Identity(2, 1));
  CHECK_THROWS_AS(btl_extend(st, sys, 2.0, 2.0, ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)),
                  DimensionError);
}
