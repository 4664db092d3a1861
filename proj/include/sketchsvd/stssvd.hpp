#pragma once

// The S^T S-SVD: A = W Theta V^T with (SW)^T (SW) = I, V orthonormal and Theta
// nonnegative nonincreasing. Two routes are provided:
//
//   sts_svd         R from a thin QR of SA, SVD of R = U1 Theta V^T, then
//                   W = A V Theta^-1 (the left factor U1 is discarded);
//   sts_svd_via_qr  sketched (randomized Gram-Schmidt) QR A = QR with
//                   (SQ)^T SQ = I, SVD of R = U Theta V^T, then W = QU.
//
// The factorization is exact whenever rank(SA) = rank(A).

#include "sketchsvd/dense.hpp"
#include "sketchsvd/sketch.hpp"

#include <string>

namespace sketchsvd {

struct StsSvdFactors {
  DenseMatrix W;      // m x r, S^T S-orthonormal columns
  Vector theta;       // r retained S^T S-singular values
  DenseMatrix V;      // n x r, orthonormal columns
  Index rank = 0;     // r
  Vector theta_all;   // all min(s, n) singular values of SA, before truncation
  SketchOperator op;
  /// Set when r == s: the sketch dimension may be below rank(A).
  bool sketch_limited = false;
  std::string warning;
};

/// max(s, n) * 2^-52
double default_rank_rtol(Index s, Index n);

/// Retains theta_i > rtol * theta_1 (negative rtol: default_rank_rtol).
StsSvdFactors sts_svd(const Matrix& A, const SketchOperator& op, double rtol = -1.0);

struct SketchedQr {
  DenseMatrix Q;   // m x n with (SQ)^T SQ = I
  DenseMatrix R;   // n x n upper triangular
  DenseMatrix SQ;  // s x n
};

/// Randomized Gram-Schmidt. A column whose residual has S-norm
/// <= rtol * ||a_j|| raises a rank_deficient error naming that column.
SketchedQr sketched_qr(const Matrix& A, const SketchOperator& op, double rtol = 1e-12);

StsSvdFactors sts_svd_via_qr(const Matrix& A, const SketchOperator& op, double rtol = -1.0);

/// Leading k terms (1 <= k <= r).
StsSvdFactors truncate(const StsSvdFactors& f, Index k);

DenseMatrix reconstruct(const StsSvdFactors& f);

/// ||X||_{S,F} = ||SX||_F and ||X||_{S,2} = ||SX||_2.
double s_fro_norm(const Matrix& X, const SketchOperator& op);
double s_two_norm(const Matrix& X, const SketchOperator& op);

/// Per-index check of sqrt(1-eps) sigma_k <= theta_k <= sqrt(1+eps) sigma_k.
struct SpectrumComparison {
  Vector theta;
  Vector sigma;
  double epsilon = 0.0;
  std::vector<bool> pass;

  bool all_pass() const;
  Index failures() const;
};

constexpr double kSpectrumSlack = 1e-10;

SpectrumComparison compare_spectra(const StsSvdFactors& f, const SvdFactors& reference,
                                   const EmbeddingCertificate& cert);
/// Compares the common leading prefix of theta and sigma.
SpectrumComparison compare_spectra(const Vector& theta, const Vector& sigma, double epsilon);

/// Number of values exceeding threshold * values(0).
Index numerical_rank(const Vector& values, double threshold);

}  // namespace sketchsvd
