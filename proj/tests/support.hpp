#pragma once

// Oracles and random-instance generators shared by the test binaries. The
// oracles avoid the library's own routines: Eigen's bidiagonal SVD, a long
// double cyclic Jacobi eigensolver and direct cosine sums.

#include "sketchsvd/matrix.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <random>
#include <vector>

namespace testsupport {

using sketchsvd::DenseMatrix;
using sketchsvd::Index;
using sketchsvd::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(eng_); }
  std::uint64_t bits() { return eng_(); }

  DenseMatrix gaussian(Index m, Index n) {
    DenseMatrix X(m, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) X(i, j) = normal();
    return X;
  }

  // m x n with orthonormal columns, via Gram-Schmidt with reorthogonalization.
  DenseMatrix orthonormal(Index m, Index n) {
    DenseMatrix Q = gaussian(m, n);
    for (Index j = 0; j < n; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (Index k = 0; k < j; ++k) Q.col(j) -= Q.col(k).dot(Q.col(j)) * Q.col(k);
      }
      Q.col(j) /= Q.col(j).norm();
    }
    return Q;
  }

  // U diag(sigma) V^T with prescribed singular values.
  DenseMatrix with_spectrum(Index m, const Vector& sigma) {
    const Index n = sigma.size();
    return orthonormal(m, n) * sigma.asDiagonal() * orthonormal(n, n).transpose();
  }

  // Geometrically graded spectrum from 1 down to 1/kappa.
  DenseMatrix conditioned(Index m, Index n, double kappa) {
    Vector sigma(n);
    for (Index i = 0; i < n; ++i) sigma(i) = std::pow(kappa, -static_cast<double>(i) / std::max<Index>(n - 1, 1));
    return with_spectrum(m, sigma);
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
};

inline Vector oracle_singular_values(const DenseMatrix& X) {
  Eigen::BDCSVD<DenseMatrix> svd(X);
  return svd.singularValues();
}

inline double oracle_two_norm(const DenseMatrix& X) {
  if (X.size() == 0) return 0.0;
  return oracle_singular_values(X)(0);
}

inline DenseMatrix oracle_range(const DenseMatrix& X, double rtol = 1e-12) {
  Eigen::BDCSVD<DenseMatrix> svd(X, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > rtol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Eigenvalues (descending) of a symmetric matrix by cyclic Jacobi rotations
// carried out in long double.
inline std::vector<long double> oracle_symmetric_eigenvalues(const DenseMatrix& S) {
  const Index n = S.rows();
  std::vector<long double> a(static_cast<std::size_t>(n * n));
  auto at = [&](Index i, Index j) -> long double& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) at(i, j) = S(i, j);
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) off += at(i, j) * at(i, j);
    if (off < 1e-60L) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (at(p, q) == 0) continue;
        const long double theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
        const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const long double c = 1 / std::sqrt(t * t + 1);
        const long double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const long double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const long double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<long double> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

inline DenseMatrix hilbert(Index n) {
  DenseMatrix H(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) H(i, j) = 1.0 / static_cast<double>(i + j + 1);
  return H;
}

// Orthonormal DCT-II by direct summation in long double.
inline DenseMatrix oracle_dct2(const DenseMatrix& X) {
  const Index m = X.rows();
  const long double pi = 3.14159265358979323846264338327950288L;
  DenseMatrix Y(m, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index k = 0; k < m; ++k) {
      long double acc = 0;
      for (Index i = 0; i < m; ++i) {
        acc += static_cast<long double>(X(i, j)) * std::cos(pi * k * (2 * i + 1) / (2.0L * m));
      }
      const long double w = k == 0 ? std::sqrt(1.0L / m) : std::sqrt(2.0L / m);
      Y(k, j) = static_cast<double>(w * acc);
    }
  }
  return Y;
}

// Distortion of an explicit s x m matrix S over an orthonormal basis U.
inline double oracle_distortion(const DenseMatrix& S, const DenseMatrix& U) {
  const Vector sv = oracle_singular_values(S * U);
  const double hi = sv(0) * sv(0) - 1.0;
  const double lo = S.rows() < U.cols() ? 1.0 : 1.0 - sv(sv.size() - 1) * sv(sv.size() - 1);
  return std::max({hi, lo, 0.0});
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace testsupport
