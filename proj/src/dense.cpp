#include "sketchsvd/dense.hpp"

#include "sketchsvd/error.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace sketchsvd {

namespace {

constexpr double kUnitRoundoff = 0x1p-52;

// Cyclic one-sided Jacobi on the columns of G (p x q, p >= q); V accumulates
// the right rotations so that G_in * V = G_out.
void jacobi_sweeps(DenseMatrix& G, DenseMatrix& V, const JacobiOptions& opts) {
  const Index q = G.cols();
  const double tol = opts.tol >= 0.0 ? opts.tol : std::sqrt(static_cast<double>(G.rows())) * kUnitRoundoff;
  V.setIdentity(q, q);
  double off = 0.0;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    bool rotated = false;
    off = 0.0;
    for (Index i = 0; i + 1 < q; ++i) {
      for (Index j = i + 1; j < q; ++j) {
        const double alpha = G.col(i).squaredNorm();
        const double beta = G.col(j).squaredNorm();
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = G.col(i).dot(G.col(j));
        const double rel = std::abs(gamma) / std::sqrt(alpha) / std::sqrt(beta);
        off = std::max(off, rel);
        if (rel <= tol) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (DenseMatrix* M : {&G, &V}) {
          double* xi = M->col(i).data();
          double* xj = M->col(j).data();
          for (Index k = 0; k < M->rows(); ++k) {
            const double a = xi[k];
            const double b = xj[k];
            xi[k] = c * a - s * b;
            xj[k] = s * a + c * b;
          }
        }
      }
    }
    if (!rotated) return;
  }
  std::ostringstream msg;
  msg << "jacobi_svd: no convergence after " << opts.max_sweeps << " sweeps (relative off-diagonal " << off << ")";
  throw NumericalError(msg.str(), off);
}

// Replaces columns flagged in `missing` by an orthonormal completion of the
// remaining columns of U.
void complete_orthonormal(DenseMatrix& U, const std::vector<bool>& missing) {
  const Index p = U.rows();
  Index probe = 0;
  for (Index j = 0; j < U.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    for (; probe < p; ++probe) {
      Vector v = Vector::Unit(p, probe);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index k = 0; k < U.cols(); ++k) {
          if (k == j || (missing[static_cast<std::size_t>(k)] && k > j)) continue;
          v -= U.col(k).dot(v) * U.col(k);
        }
      }
      const double nv = v.norm();
      if (nv > 0.5) {
        U.col(j) = v / nv;
        ++probe;
        break;
      }
    }
  }
}

}  // namespace

QrFactors householder_qr(const DenseMatrix& X) {
  const Index m = X.rows();
  const Index n = X.cols();
  require(m >= n, ErrorCode::shape, "householder_qr: requires rows >= cols");
  Eigen::HouseholderQR<DenseMatrix> qr(X);
  QrFactors out;
  out.Q = qr.householderQ() * DenseMatrix::Identity(m, n);
  out.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    if (out.R(i, i) < 0.0) {
      out.R.row(i) *= -1.0;
      out.Q.col(i) *= -1.0;
    }
  }
  return out;
}

SvdFactors jacobi_svd(const DenseMatrix& X, const JacobiOptions& opts) {
  require(X.allFinite(), ErrorCode::numerical_failure, "jacobi_svd: non-finite input");
  const Index p = X.rows();
  const Index q = X.cols();
  if (p < q) {
    SvdFactors f = jacobi_svd(X.transpose(), opts);
    std::swap(f.U, f.V);
    return f;
  }
  if (q == 0) return {DenseMatrix(p, 0), Vector(0), DenseMatrix(0, 0)};

  DenseMatrix G;
  DenseMatrix Qpre;
  if (p > q) {
    QrFactors qr = householder_qr(X);
    G = std::move(qr.R);
    Qpre = std::move(qr.Q);
  } else {
    G = X;
  }
  DenseMatrix V;
  jacobi_sweeps(G, V, opts);

  Vector norms(q);
  for (Index j = 0; j < q; ++j) norms(j) = G.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

  SvdFactors f;
  f.sigma.resize(q);
  f.U.resize(G.rows(), q);
  f.V.resize(q, q);
  std::vector<bool> missing(static_cast<std::size_t>(q), false);
  for (Index k = 0; k < q; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    f.sigma(k) = norms(j);
    f.V.col(k) = V.col(j);
    if (norms(j) > 0.0) {
      f.U.col(k) = G.col(j) / norms(j);
    } else {
      f.U.col(k).setZero();
      missing[static_cast<std::size_t>(k)] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) complete_orthonormal(f.U, missing);
  if (p > q) f.U = Qpre * f.U;
  return f;
}

Vector singular_values(const DenseMatrix& X) { return jacobi_svd(X).sigma; }

double default_pinv_rtol(Index m, Index n) { return static_cast<double>(std::max(m, n)) * kUnitRoundoff; }

DenseMatrix pinv_apply(const DenseMatrix& X, const DenseMatrix& B, double rtol) {
  require(B.rows() == X.rows(), ErrorCode::shape, "pinv_apply: B must have as many rows as X");
  if (rtol < 0.0) rtol = default_pinv_rtol(X.rows(), X.cols());
  const SvdFactors f = jacobi_svd(X);
  Index r = 0;
  if (f.sigma.size() > 0 && f.sigma(0) > 0.0) {
    while (r < f.sigma.size() && f.sigma(r) > rtol * f.sigma(0)) ++r;
  }
  const Vector inv = f.sigma.head(r).cwiseInverse();
  return f.V.leftCols(r) * (inv.asDiagonal() * (f.U.leftCols(r).transpose() * B));
}

PolarFactors polar_factors(const DenseMatrix& X) {
  require(X.rows() >= X.cols(), ErrorCode::shape, "polar_factors: requires rows >= cols");
  const SvdFactors f = jacobi_svd(X);
  PolarFactors out;
  out.Q = f.U * f.V.transpose();
  DenseMatrix H = f.V * f.sigma.asDiagonal() * f.V.transpose();
  out.H = 0.5 * (H + H.transpose());
  return out;
}

namespace {

template <typename Apply, typename ApplyT>
double power_iteration(Index n, Apply apply, ApplyT apply_t, const SpectralNormOptions& opts) {
  std::mt19937_64 eng(opts.seed);
  boost::random::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(eng);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vector w = apply(v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    const Vector z = apply_t(w);
    v = z / z.norm();
    if (std::abs(next - sigma) <= opts.tol * next) return next;
    sigma = next;
  }
  std::ostringstream msg;
  msg << "spectral_norm: power iteration did not converge in " << opts.max_iterations
      << " iterations (best estimate " << sigma << ")";
  throw NumericalError(msg.str(), sigma);
}

}  // namespace

double spectral_norm(const DenseMatrix& X, const SpectralNormOptions& opts) {
  require(X.allFinite(), ErrorCode::numerical_failure, "spectral_norm: non-finite input");
  if (X.size() == 0) return 0.0;
  if (std::min(X.rows(), X.cols()) <= opts.crossover) return singular_values(X)(0);
  return power_iteration(
      X.cols(), [&](const Vector& v) -> Vector { return X * v; },
      [&](const Vector& w) -> Vector { return X.transpose() * w; }, opts);
}

double spectral_norm(const Matrix& X, const SpectralNormOptions& opts) {
  if (!X.is_sparse()) return spectral_norm(X.dense(), opts);
  if (X.rows() == 0 || X.cols() == 0) return 0.0;
  if (std::min(X.rows(), X.cols()) <= opts.crossover) return singular_values(X.to_dense())(0);
  const SparseMatrix& S = X.sparse();
  return power_iteration(
      X.cols(), [&](const Vector& v) -> Vector { return S * v; },
      [&](const Vector& w) -> Vector { return S.transpose() * w; }, opts);
}

double fro_norm(const DenseMatrix& X) { return X.norm(); }

DenseMatrix range_basis(const DenseMatrix& X, double rtol) {
  if (rtol < 0.0) rtol = default_pinv_rtol(X.rows(), X.cols());
  if (X.cols() == 0) return DenseMatrix(X.rows(), 0);
  const SvdFactors f = jacobi_svd(X);
  Index r = 0;
  if (f.sigma(0) > 0.0) {
    while (r < f.sigma.size() && f.sigma(r) > rtol * f.sigma(0)) ++r;
  }
  return f.U.leftCols(r);
}

double gram_deviation(const DenseMatrix& X) {
  if (X.cols() == 0) return 0.0;
  const DenseMatrix G = X.transpose() * X - DenseMatrix::Identity(X.cols(), X.cols());
  return singular_values(G)(0);
}

}  // namespace sketchsvd
