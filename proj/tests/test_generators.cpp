#include "doctest.h"

#include "sketchsvd/error.hpp"
#include "sketchsvd/generators.hpp"
#include "sketchsvd/matrix.hpp"
#include "support.hpp"

using namespace sketchsvd;

namespace {

double condition(const Matrix& A) {
  const Vector s = testsupport::oracle_singular_values(A.to_dense());
  return s(0) / s(s.size() - 1);
}

}  // namespace

TEST_CASE("cauchy entries") {
  CauchySpec spec;
  spec.n = 2;
  const DenseMatrix C = gen_cauchy(spec).dense();
  CHECK(C(0, 0) == -1.0 / 998.0);
  CHECK(C(0, 1) == 1.0 / (2.0 - 500.0));
  CHECK(C(1, 0) == 1.0 / (100.0 - 1000.0));
  CHECK(C(1, 1) == 1.0 / (100.0 - 500.0));

  spec.n = 5;
  const DenseMatrix D = gen_cauchy(spec).dense();
  // x = 2, 26.5, 51, 75.5, 100; y = -1000, -875, -750, -625, -500
  CHECK(D(2, 3) == 1.0 / (51.0 - 625.0));
  CHECK(D(4, 4) == 1.0 / (100.0 - 500.0));

  spec.n = 1;
  CHECK_THROWS_AS(gen_cauchy(spec), Error);
  spec.n = 3;
  spec.x_lo = 500.0;
  spec.x_hi = 1000.0;
  CHECK_THROWS_AS(gen_cauchy(spec), Error);
}

TEST_CASE("cauchy rank at desk scale") {
  const Vector s = testsupport::oracle_singular_values(gen_cauchy({}).to_dense());
  Index r = 0;
  while (r < s.size() && s(r) > 1e-12 * s(0)) ++r;
  CHECK(r <= 12);
  CHECK(r >= 4);
}

TEST_CASE("sparse generator density and structure") {
  const Index m = 2000, n = 50;
  const Matrix A = gen_sparse_conditioned(m, n, 0.01, 1e10, 5);
  CHECK(A.is_sparse());
  CHECK(A.nnz() >= 0.9 * 0.01 * m * n);
  CHECK(A.nnz() <= 1.1 * 0.01 * m * n);
  const DenseMatrix D = A.to_dense();
  for (Index j = 0; j < n; ++j) CHECK(D.col(j).norm() > 0.0);
  const double kappa = condition(A);
  CHECK(kappa >= 1e9);
  CHECK(kappa <= 1e11);
}

TEST_CASE("sparse generator is deterministic in its seed") {
  const DenseMatrix a = gen_sparse_conditioned(100, 5, 0.1, 10.0, 3).to_dense();
  const DenseMatrix b = gen_sparse_conditioned(100, 5, 0.1, 10.0, 3).to_dense();
  const DenseMatrix c = gen_sparse_conditioned(100, 5, 0.1, 10.0, 4).to_dense();
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.0);
}

TEST_CASE("dense well-conditioned corner") {
  const Matrix A = gen_sparse_conditioned(200, 10, 1.0, 1.0, 6);
  CHECK(A.nnz() == 2000);
  CHECK(condition(A) <= 10.0);
}

TEST_CASE("too sparse falls back to one entry per column") {
  const Matrix A = gen_sparse_conditioned(100, 30, 1e-4, 100.0, 7);
  CHECK(A.nnz() == 30);
  const DenseMatrix D = A.to_dense();
  for (Index j = 0; j < 30; ++j) CHECK(D.col(j).norm() > 0.0);
}

TEST_CASE("sparse generator argument checks") {
  CHECK_THROWS_AS(gen_sparse_conditioned(10, 2, 0.0, 1.0, 1), Error);
  CHECK_THROWS_AS(gen_sparse_conditioned(10, 2, 1.5, 1.0, 1), Error);
  CHECK_THROWS_AS(gen_sparse_conditioned(10, 2, 0.5, 0.5, 1), Error);
  CHECK_THROWS_AS(gen_sparse_conditioned(0, 2, 0.5, 1.0, 1), Error);
}

TEST_CASE("gaussian and orthonormal generators") {
  const DenseMatrix G = gen_gaussian(300, 20, 8);
  CHECK(std::fabs(G.mean()) < 0.05);
  CHECK(std::fabs(G.squaredNorm() / G.size() - 1.0) < 0.05);
  const DenseMatrix Q = gen_orthonormal(30, 6, 9);
  CHECK((Q.transpose() * Q - DenseMatrix::Identity(6, 6)).norm() < 1e-13);
  const DenseMatrix O = gen_orthogonal(8, 10);
  CHECK((O * O.transpose() - DenseMatrix::Identity(8, 8)).norm() < 1e-13);
  CHECK_THROWS_AS(gen_orthonormal(3, 4, 1), Error);
}
