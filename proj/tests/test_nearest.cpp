#include "doctest.h"

#include "sketchsvd/dense.hpp"
#include "sketchsvd/error.hpp"
#include "sketchsvd/nearest.hpp"
#include "support.hpp"

#include "json.hpp"

using namespace sketchsvd;
using testsupport::Rng;

namespace {

double s_two(const SketchOperator& op, const DenseMatrix& X) { return testsupport::oracle_two_norm(op.apply(X)); }
double s_fro(const SketchOperator& op, const DenseMatrix& X) { return op.apply(X).norm(); }

const BoundReport& find(const std::vector<BoundReport>& v, const std::string& id) {
  for (const auto& b : v)
    if (b.bound_id == id) return b;
  FAIL("missing bound " << id);
  return v.front();
}

}  // namespace

TEST_CASE("already S-orthonormal input is its own nearest matrix") {
  Rng rng(71);
  const SketchOperator op(SketchKind::gaussian, 30, 60, 72);
  const DenseMatrix W0 = sts_svd(rng.gaussian(60, 4), op).W;
  const PolarPair p = nearest_sts_orthogonal(W0, op);
  CHECK(p.mode == PolarMode::s_orthogonal);
  CHECK((p.P - W0).norm() < 1e-12);
  CHECK((p.H - DenseMatrix::Identity(4, 4)).norm() < 1e-12);

  const PolarPair q = nearest_sts_orthogonal(DenseMatrix(3.0 * W0), op);
  CHECK((q.P - W0).norm() < 1e-12);
  CHECK((q.H - 3.0 * DenseMatrix::Identity(4, 4)).norm() < 1e-12);
  CHECK(s_two(op, DenseMatrix(3.0 * W0 - q.P)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("polar pair invariants and residual identities") {
  Rng rng(73);
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix A = rng.conditioned(80, 7, 1e3);
    const SketchOperator op(SketchKind::srtt, 40, 80, rng.bits());
    const StsSvdFactors f = sts_svd(A, op);
    const PolarPair p = nearest_sts_orthogonal(f);
    const double a2 = testsupport::oracle_two_norm(A);
    CHECK((A - p.P * p.H).norm() <= 1e-10 * a2);
    CHECK((p.H - p.H.transpose()).norm() <= 1e-12 * a2);
    CHECK(Eigen::SelfAdjointEigenSolver<DenseMatrix>(p.H).eigenvalues().minCoeff() >= -1e-12 * a2);
    const DenseMatrix SP = op.apply(p.P);
    CHECK(testsupport::oracle_two_norm(SP.transpose() * SP - DenseMatrix::Identity(7, 7)) <= 1e-10);
    const Vector d = f.theta - Vector::Ones(7);
    CHECK(testsupport::rel_err(s_fro(op, A - p.P), d.norm()) < 1e-10);
    CHECK(testsupport::rel_err(s_two(op, A - p.P), d.cwiseAbs().maxCoeff()) < 1e-10);
  }
}

TEST_CASE("nearest S-orthogonal matrix beats random members of the feasible set") {
  Rng rng(74);
  const DenseMatrix A = rng.gaussian(40, 6);
  const SketchOperator op(SketchKind::gaussian, 24, 40, 75);
  const StsSvdFactors f = sts_svd(A, op);
  const PolarPair p = nearest_sts_orthogonal(f);
  const double best_fro = s_fro(op, A - p.P);
  const double best_two = s_two(op, A - p.P);
  for (int c = 0; c < 300; ++c) {
    const DenseMatrix L = rng.orthonormal(6, 6);
    const DenseMatrix Q = f.W * L * f.V.transpose();
    CHECK(s_fro(op, A - Q) >= best_fro - 1e-10);
    CHECK(s_two(op, A - Q) >= best_two - 1e-10);
  }
}

TEST_CASE("rank-deficient input is rejected") {
  Rng rng(76);
  DenseMatrix A = rng.gaussian(30, 3);
  A.col(2) = A.col(0);
  const SketchOperator op(SketchKind::gaussian, 15, 30, 77);
  try {
    nearest_sts_orthogonal(A, op);
    FAIL("expected rank deficiency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rank_deficient);
  }
}

TEST_CASE("classical nearest orthogonal matrix") {
  Rng rng(78);
  const DenseMatrix Q = rng.orthonormal(9, 4);
  CHECK((nearest_orthogonal(Q).P - Q).norm() < 1e-13);

  DenseMatrix D = DenseMatrix::Zero(4, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 0.5;
  const PolarPair t = nearest_orthogonal(D);
  CHECK((t.P - DenseMatrix::Identity(4, 2)).norm() < 1e-14);
  CHECK(testsupport::oracle_two_norm(D - t.P) == doctest::Approx(1.0));

  const DenseMatrix A = rng.gaussian(12, 4);
  const PolarPair c = nearest_orthogonal(A);
  CHECK(c.mode == PolarMode::orthogonal);
  CHECK(gram_deviation(c.P) <= 1e-12);
  const double best_fro = (A - c.P).norm(), best_two = testsupport::oracle_two_norm(A - c.P);
  for (int k = 0; k < 500; ++k) {
    const DenseMatrix R = rng.orthonormal(12, 4);
    CHECK(best_fro <= (A - R).norm() + 1e-12);
    CHECK(best_two <= testsupport::oracle_two_norm(A - R) + 1e-12);
  }
  CHECK_THROWS_AS(nearest_orthogonal(DenseMatrix(DenseMatrix::Ones(2, 3))), Error);
}

TEST_CASE("S^T S-polar factor of an orthonormal matrix") {
  Rng rng(79);
  SUBCASE("isometric sketch") {
    const DenseMatrix T = rng.orthonormal(16, 3);
    const PolarPair p = sts_polar_of_orthonormal(T, SketchOperator(SketchKind::srtt, 16, 16, 80));
    CHECK((p.P - T).norm() < 1e-13);
    CHECK((p.H - DenseMatrix::Identity(3, 3)).norm() < 1e-13);
  }
  SUBCASE("single column") {
    const DenseMatrix T = rng.orthonormal(20, 1);
    const SketchOperator op(SketchKind::gaussian, 7, 20, 81);
    const double st = op.apply(T).norm();
    const PolarPair p = sts_polar_of_orthonormal(T, op);
    CHECK(p.H(0, 0) == doctest::Approx(st).epsilon(1e-14));
    CHECK((p.P - T / st).norm() < 1e-14);
  }
  SUBCASE("distance bounded by the measured distortion") {
    for (int t = 0; t < 20; ++t) {
      const DenseMatrix T = rng.orthonormal(60, 5);
      const SketchOperator op(SketchKind::gaussian, 30, 60, rng.bits());
      const PolarPair p = sts_polar_of_orthonormal(T, op);
      const DenseMatrix SQ = op.apply(p.P);
      CHECK(testsupport::oracle_two_norm(SQ.transpose() * SQ - DenseMatrix::Identity(5, 5)) <= 1e-8);
      CHECK(s_two(op, T - p.P) <= empirical_epsilon(op, T).epsilon_emp + 1e-10);
    }
  }
  SUBCASE("embedding failure") {
    const DenseMatrix T = rng.orthonormal(20, 4);
    try {
      sts_polar_of_orthonormal(T, SketchOperator(SketchKind::gaussian, 2, 20, 82));
      FAIL("expected a numerical failure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::numerical_failure);
    }
    CHECK_THROWS_AS(sts_polar_of_orthonormal(DenseMatrix(2.0 * T), SketchOperator(SketchKind::srtt, 8, 20, 83)),
                    Error);
  }
}

TEST_CASE("bound report helpers") {
  CHECK(distortion_ratio(0.5) == 1.0);
  CHECK(std::isinf(distortion_ratio(1.0)));
  CHECK(make_bound("x", 1.0, 1.0 - 5e-11, 0.1, "").pass);
  CHECK(!make_bound("x", 1.0, 1.0 - 2e-10, 0.1, "").pass);

  BoundReport b = make_bound("s_orthonormal_gram_2", 0.25, 1.0, 0.5, "gram");
  b.matrix_id = "m1";
  b.s = 60;
  b.seed = 9;
  CHECK(bound_csv_header() == "bound_id,lhs,rhs,epsilon,pass,matrix_id,s,seed");
  CHECK(to_csv_row(b) == "s_orthonormal_gram_2,0.25,1,0.5,true,m1,60,9");
  const auto j = nlohmann::json::parse(to_json_line(b));
  CHECK(j["bound_id"] == "s_orthonormal_gram_2");
  CHECK(j["lhs"] == 0.25);
  CHECK(j["pass"] == true);
  CHECK(j["s"] == 60);
  CHECK(j["seed"] == 9);
  CHECK(j["matrix_id"] == "m1");
  CHECK(j.size() == 8);
}

TEST_CASE("orthogonality report classifies its input") {
  Rng rng(84);
  const DenseMatrix A = rng.gaussian(300, 10);
  const SketchOperator op(SketchKind::gaussian, 150, 300, 85);
  const DenseMatrix W = sts_svd(A, op).W;
  const auto cert = empirical_epsilon(op, testsupport::oracle_range(W));
  const auto rep = orthogonality_report(W, op, cert);
  CHECK(rep.size() == 5);
  for (const auto& b : rep) CHECK_MESSAGE(b.pass, b.bound_id);
  CHECK(find(rep, "higham_lower").lhs <= find(rep, "higham_lower").rhs + 1e-12);

  const DenseMatrix T = rng.orthonormal(300, 10);
  const auto rep2 = orthogonality_report(T, op, empirical_epsilon(op, T));
  CHECK(rep2.size() == 3);
  for (const auto& b : rep2) CHECK_MESSAGE(b.pass, b.bound_id);

  const SketchOperator full(SketchKind::srtt, 300, 300, 86);
  const DenseMatrix Wf = sts_svd(A, full).W;
  const auto rep3 = orthogonality_report(Wf, full, empirical_epsilon(full, Wf));
  for (const auto& b : rep3) CHECK(b.lhs <= 1e-10);

  CHECK_THROWS_AS(orthogonality_report(A, op, cert), Error);
}

TEST_CASE("sandwich at the measured distortion") {
  Rng rng(87);
  int flagged = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const DenseMatrix A = rng.gaussian(100, 8);
    const SketchOperator op(SketchKind::gaussian, 48, 100, derive_seed(88, seed));
    const SandwichReport r = nearest_sandwich_report(A, op);
    CHECK(r.pass());
    flagged += !r.narrow_pass;
    CHECK(r.lower.bound_id == "sandwich_lower");
    CHECK(r.upper.bound_id == "sandwich_upper");
    CHECK(r.epsilon == doctest::Approx(empirical_epsilon(op, testsupport::oracle_range(A)).epsilon_emp));
  }
  MESSAGE("narrow-range flags: " << flagged);
}

TEST_CASE("sandwich with orthonormal input") {
  Rng rng(89);
  const DenseMatrix Q = rng.orthonormal(100, 10);
  const SketchOperator op(SketchKind::gaussian, 60, 100, 90);
  const SandwichReport r = nearest_sandwich_report(Q, op);
  CHECK(r.dist_A_T < 1e-13);
  CHECK(r.dist_A_P <= distortion_ratio(r.epsilon) + 1e-10);
  CHECK(r.pass());
}

TEST_CASE("full-sample srtt collapses to the classical solution") {
  Rng rng(91);
  const DenseMatrix A = rng.gaussian(64, 6);
  const SketchOperator op(SketchKind::srtt, 64, 64, 92);
  CHECK(testsupport::oracle_two_norm(nearest_sts_orthogonal(A, op).P - nearest_orthogonal(A).P) <= 1e-10);
}
