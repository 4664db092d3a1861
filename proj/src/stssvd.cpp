#include "sketchsvd/stssvd.hpp"

#include "sketchsvd/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sketchsvd {

double default_rank_rtol(Index s, Index n) { return static_cast<double>(std::max(s, n)) * 0x1p-52; }

Index numerical_rank(const Vector& values, double threshold) {
  if (values.size() == 0 || !(values(0) > 0.0)) return 0;
  Index r = 0;
  while (r < values.size() && values(r) > threshold * values(0)) ++r;
  return r;
}

namespace {

StsSvdFactors assemble(const SketchOperator& op, const SvdFactors& small, double rtol) {
  StsSvdFactors f{.W = {}, .theta = {}, .V = {}, .rank = 0, .theta_all = small.sigma, .op = op, .sketch_limited = false, .warning = {}};
  f.rank = numerical_rank(small.sigma, rtol);
  f.theta = small.sigma.head(f.rank);
  f.V = small.V.leftCols(f.rank);
  if (f.rank > 0 && f.rank == op.rows()) {
    f.sketch_limited = true;
    std::ostringstream msg;
    msg << "retained rank equals the sketch dimension s=" << op.rows()
        << "; sketch dimension may be below rank(A)";
    f.warning = msg.str();
  }
  return f;
}

// One S-orthogonalization pass on W = A V inv(Theta): SW = Q2 R2, then
// A = (W inv(R2)) (R2 Theta) V^T is re-diagonalized.
void reorthogonalize(StsSvdFactors& f) {
  if (f.rank == 0) return;
  const QrFactors qr = householder_qr(f.op.apply(f.W));
  if (!(qr.R.diagonal().minCoeff() > 0.0)) return;
  const SvdFactors small = jacobi_svd(qr.R * f.theta.asDiagonal());
  const DenseMatrix inv_r = qr.R.triangularView<Eigen::Upper>().solve(small.U);
  f.W = f.W * inv_r;
  f.theta = small.sigma;
  f.V = f.V * small.V;
}

}  // namespace

StsSvdFactors sts_svd(const Matrix& A, const SketchOperator& op, double rtol) {
  require(A.rows() == op.cols(), ErrorCode::shape, "sts_svd: operator ambient dimension differs from rows(A)");
  const Index n = A.cols();
  const Index s = op.rows();
  if (rtol < 0.0) rtol = default_rank_rtol(s, n);

  const DenseMatrix SA = op.apply(A);
  require(SA.allFinite(), ErrorCode::numerical_failure, "sts_svd: sketched matrix has non-finite entries");

  SvdFactors small;
  if (n == 0) {
    small = {DenseMatrix(s, 0), Vector(0), DenseMatrix(0, 0)};
  } else if (s >= n) {
    small = jacobi_svd(householder_qr(SA).R);
  } else {
    small = jacobi_svd(SA);
  }
  StsSvdFactors f = assemble(op, small, rtol);
  const DenseMatrix scaled = f.V * f.theta.cwiseInverse().asDiagonal();
  f.W = A.multiply(scaled);
  reorthogonalize(f);
  return f;
}

SketchedQr sketched_qr(const Matrix& A, const SketchOperator& op, double rtol) {
  require(A.rows() == op.cols(), ErrorCode::shape, "sketched_qr: operator ambient dimension differs from rows(A)");
  const Index m = A.rows();
  const Index n = A.cols();
  const Index s = op.rows();
  require(s >= n, ErrorCode::invalid_dimension, "sketched_qr: sketch dimension must be at least cols(A)");

  const DenseMatrix SA = op.apply(A);
  require(SA.allFinite(), ErrorCode::numerical_failure, "sketched_qr: sketched matrix has non-finite entries");

  SketchedQr out{DenseMatrix(m, n), DenseMatrix::Zero(n, n), DenseMatrix(s, n)};
  for (Index j = 0; j < n; ++j) {
    const Vector a = A.column(j);
    const auto basis = out.SQ.leftCols(j);
    // Least-squares coefficients against the sketched basis, with one
    // refinement step.
    Vector r = basis.transpose() * SA.col(j);
    r += basis.transpose() * (SA.col(j) - basis * r);
    const Vector q = a - out.Q.leftCols(j) * r;
    const Vector sq = op.apply(q);
    const double rjj = sq.norm();
    if (!(rjj > rtol * a.norm())) {
      std::ostringstream msg;
      msg << "sketched_qr: column " << (j + 1) << " is linearly dependent on the previous columns (residual S-norm "
          << rjj << ")";
      fail(ErrorCode::rank_deficient, msg.str());
    }
    out.R.col(j).head(j) = r;
    out.R(j, j) = rjj;
    out.Q.col(j) = q / rjj;
    out.SQ.col(j) = sq / rjj;
  }
  return out;
}

StsSvdFactors sts_svd_via_qr(const Matrix& A, const SketchOperator& op, double rtol) {
  const SketchedQr qr = sketched_qr(A, op);
  if (rtol < 0.0) rtol = default_rank_rtol(op.rows(), A.cols());
  const SvdFactors small = jacobi_svd(qr.R);
  StsSvdFactors f = assemble(op, small, rtol);
  f.W = qr.Q * small.U.leftCols(f.rank);
  return f;
}

StsSvdFactors truncate(const StsSvdFactors& f, Index k) {
  require(k >= 1 && k <= f.rank, ErrorCode::invalid_argument, "truncate: need 1 <= k <= rank");
  StsSvdFactors t = f;
  t.W = f.W.leftCols(k);
  t.theta = f.theta.head(k);
  t.V = f.V.leftCols(k);
  t.rank = k;
  t.sketch_limited = false;
  t.warning.clear();
  return t;
}

DenseMatrix reconstruct(const StsSvdFactors& f) { return f.W * f.theta.asDiagonal() * f.V.transpose(); }

double s_fro_norm(const Matrix& X, const SketchOperator& op) { return op.apply(X).norm(); }

double s_two_norm(const Matrix& X, const SketchOperator& op) { return spectral_norm(op.apply(X)); }

bool SpectrumComparison::all_pass() const { return failures() == 0; }

Index SpectrumComparison::failures() const {
  return static_cast<Index>(std::count(pass.begin(), pass.end(), false));
}

SpectrumComparison compare_spectra(const Vector& theta, const Vector& sigma, double epsilon) {
  require(epsilon >= 0.0, ErrorCode::invalid_argument, "compare_spectra: epsilon must be nonnegative");
  const Index k = std::min(theta.size(), sigma.size());
  SpectrumComparison cmp{theta.head(k), sigma.head(k), epsilon, {}};
  const double lo = std::sqrt(std::max(0.0, 1.0 - epsilon));
  const double hi = std::sqrt(1.0 + epsilon);
  cmp.pass.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    cmp.pass.push_back(lo * sigma(i) - kSpectrumSlack <= theta(i) && theta(i) <= hi * sigma(i) + kSpectrumSlack);
  }
  return cmp;
}

SpectrumComparison compare_spectra(const StsSvdFactors& f, const SvdFactors& reference,
                                   const EmbeddingCertificate& cert) {
  require(f.W.rows() == reference.U.rows() && f.V.rows() == reference.V.rows(), ErrorCode::shape,
          "compare_spectra: factorizations describe matrices of different shapes");
  return compare_spectra(f.theta_all, reference.sigma, cert.epsilon_emp);
}

}  // namespace sketchsvd
