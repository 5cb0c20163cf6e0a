// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "abtl/errors.hpp"
#include "abtl/problems_io.hpp"
#include "abtl/shifted_solver.hpp"
#include "support.hpp"

using namespace abtl;
using testing::rel;

namespace {

ComplexMatrix random_rhs(Index n, Index k, std::uint64_t seed) {
  return testing::random_dense(n, k, seed).cast<cplx>() +
         cplx(0, 1) * testing::random_dense(n, k, seed + 1).cast<cplx>();
}

}  // namespace

TEST_CASE("zero matrix with unit shift is the identity solve") {
  const SparseMatrix A(3, 3);
  const auto f = factorize(A, 1.0);
  const ComplexMatrix X = random_rhs(3, 2, 1);
  CHECK(rel(f->solve(X), X) <= 1e-15);
  CHECK(rel(f->solve_transposed(X), X) <= 1e-15);
}

TEST_CASE("diagonal example") {
  const SparseMatrix A = testing::to_sparse((Matrix(2, 2) << -1, 0, 0, -2).finished());
  const auto f = factorize(A, 0.0);
  const ComplexMatrix b = (ComplexMatrix(2, 1) << 3.0, 4.0).finished();
  const ComplexMatrix x = f->solve(b);
  CHECK(std::abs(x(0, 0) - cplx(3.0)) < 1e-15);
  CHECK(std::abs(x(1, 0) - cplx(2.0)) < 1e-15);
}

TEST_CASE("sparse path on FDM n = 900") {
  const SparseMatrix A = fdm_matrix(30, FdmCoefficients::standard());
  const auto f = factorize(A, 1.0);
  CHECK_FALSE(f->is_dense());
  const ComplexMatrix B = random_rhs(900, 3, 2);
  const ComplexMatrix X = f->solve(B);
  const ComplexSparseMatrix P = shifted_operator(A, 1.0);
  CHECK((P * X - B).norm() / B.norm() <= 1e-12);
  const ComplexMatrix Y = f->solve_transposed(B);
  CHECK((ComplexSparseMatrix(P.transpose()) * Y - B).norm() / B.norm() <= 1e-12);
}

TEST_CASE("dense and sparse paths agree with a dense solve") {
  const SparseMatrix A = testing::random_stable_matrix(100, 4);
  const cplx sigma{0.5, 3.0};
  const ComplexMatrix P = sigma * ComplexMatrix::Identity(100, 100) - Matrix(A).cast<cplx>();
  const ComplexMatrix B = random_rhs(100, 4, 5);
  const auto dense = factorize(A, sigma);
  const auto sparse = factorize(A, sigma, 0);
  CHECK(dense->is_dense());
  CHECK_FALSE(sparse->is_dense());
  const ComplexMatrix oracle = P.fullPivLu().solve(B);
  CHECK(rel(dense->solve(B), oracle) <= 1e-12);
  CHECK(rel(sparse->solve(B), oracle) <= 1e-12);
  const ComplexMatrix oracle_t = P.transpose().fullPivLu().solve(B);
  CHECK(rel(dense->solve_transposed(B), oracle_t) <= 1e-12);
  CHECK(rel(sparse->solve_transposed(B), oracle_t) <= 1e-12);
}

TEST_CASE("symmetric matrix: transposed solve equals solve") {
  const Matrix R = testing::random_dense(40, 40, 6);
  const Matrix S = R + R.transpose();
  const auto f = factorize(testing::to_sparse(S), cplx(1.0, 2.0));
  const ComplexMatrix B = random_rhs(40, 2, 7);
  CHECK(rel(f->solve_transposed(B), f->solve(B)) <= 1e-12);
}

TEST_CASE("transposed solve of C^T L is finite and nonzero") {
  const auto sys = testing::random_system(50, 3, 8);
  const auto f = factorize(sys.state_matrix(), 1.0);
  ComplexMatrix L = ComplexMatrix::Zero(3, 1);
  L(1, 0) = 1.0;
  const ComplexMatrix Y = f->solve_transposed(sys.output().transpose().cast<cplx>() * L);
  CHECK(std::isfinite(Y.norm()));
  CHECK(Y.norm() > 0.0);
}

TEST_CASE("singular shift detection on both paths") {
  const SparseMatrix I = testing::to_sparse(Matrix::Identity(10, 10));
  CHECK_THROWS_AS(factorize(I, 1.0), SingularShiftError);
  CHECK_THROWS_AS(factorize(I, 1.0, 0), SingularShiftError);
  try {
    factorize(I, cplx(1.0, 0.0), 0);
  } catch (const SingularShiftError& e) {
    CHECK(e.shift() == cplx(1.0));
  }
  // nearly singular: pivot ratio 1e-16
  Matrix D = Matrix::Identity(3, 3);
  D(2, 2) = 1.0 - 1e-16;
  CHECK_THROWS_AS(factorize(testing::to_sparse(D), 1.0), SingularShiftError);
}

TEST_CASE("solve dimension checks") {
  const auto f = factorize(testing::random_stable_matrix(5, 1), 1.0);
  CHECK_THROWS_AS(f->solve(ComplexMatrix::Ones(4, 1)), DimensionError);
  CHECK_THROWS_AS(f->solve_transposed(ComplexMatrix::Ones(6, 1)), DimensionError);
}

TEST_CASE("round trip residual for cached factorizations") {
  const SparseMatrix A = testing::random_stable_matrix(60, 9);
  SolverCache cache(3);
  const auto make = [&](cplx s) -> std::shared_ptr<const ShiftedSolve> { return factorize(A, s); };
  for (cplx s : {cplx(1.0), cplx(0, 2.0), cplx(3.0, -1.0)}) {
    const auto f = cache.get(s, make);
    const ComplexMatrix X = random_rhs(60, 2, 10);
    const ComplexMatrix Y = f->solve(X);
    CHECK((shifted_operator(A, s) * Y - X).norm() / X.norm() <= 1e-12);
  }
}

TEST_CASE("cache is LRU and exact on the shift") {
  const SparseMatrix A = testing::random_stable_matrix(20, 11);
  SolverCache cache(2);
  CHECK(cache.capacity() == 2);
  int built = 0;
  const auto make = [&](cplx s) -> std::shared_ptr<const ShiftedSolve> {
    ++built;
    return factorize(A, s);
  };
  const auto a = cache.get(1.0, make);
  cache.get(2.0, make);
  CHECK(cache.get(1.0, make) == a);  // hit refreshes 1.0
  CHECK(built == 2);
  cache.get(3.0, make);  // evicts 2.0
  CHECK(cache.size() == 2);
  CHECK(cache.contains(1.0));
  CHECK_FALSE(cache.contains(2.0));
  CHECK_FALSE(cache.contains(cplx(1.0, 1e-300)));
  CHECK(cache.misses() == 3);

  const ComplexMatrix X = random_rhs(20, 1, 3);
  const ComplexMatrix before = cache.get(2.0, make)->solve(X);
  cache.clear();
  CHECK(cache.size() == 0);
  CHECK(cache.get(2.0, make)->solve(X) == before);
}

TEST_CASE("concurrent lookups share results") {
  const SparseMatrix A = testing::random_stable_matrix(50, 12);
  SolverCache cache;
  const auto make = [&](cplx s) -> std::shared_ptr<const ShiftedSolve> { return factorize(A, s); };
  const ComplexMatrix X = random_rhs(50, 2, 4);
  std::vector<ComplexMatrix> out(8);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] { out[t] = cache.get(cplx(1.0 + t % 3), make)->solve(X); });
  }
  for (auto& th : threads) th.join();
  for (int t = 0; t < 8; ++t) CHECK(out[t] == factorize(A, cplx(1.0 + t % 3))->solve(X));
  CHECK(cache.size() == 3);
}
