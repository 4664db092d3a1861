#pragma once

// Deterministic dense kernels: QR, one-sided Jacobi SVD, pseudo-inverse
// application, polar factors, and matrix norms.

#include "sketchsvd/matrix.hpp"

namespace sketchsvd {

struct QrFactors {
  DenseMatrix Q;  // m x n, orthonormal columns
  DenseMatrix R;  // n x n, upper triangular with nonnegative diagonal
};

/// Thin Householder QR of a tall matrix (m >= n).
QrFactors householder_qr(const DenseMatrix& X);

/// X = U * diag(sigma) * V^T with k = min(rows, cols) columns in U and V,
/// sigma nonincreasing. Columns of U belonging to zero singular values are an
/// orthonormal completion.
struct SvdFactors {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;
};

struct JacobiOptions {
  int max_sweeps = 30;
  /// Relative orthogonality threshold |x_i.x_j| <= tol * |x_i| |x_j|;
  /// a negative value selects sqrt(rows) * 2^-52.
  double tol = -1.0;
};

/// One-sided (Hestenes) Jacobi SVD. Tall inputs are first reduced by QR and
/// wide inputs are transposed; the Jacobi sweeps then run on a square factor.
/// Small singular values are resolved to high relative accuracy.
SvdFactors jacobi_svd(const DenseMatrix& X, const JacobiOptions& opts = {});

/// Singular values only (same Jacobi route).
Vector singular_values(const DenseMatrix& X);

/// max(m, n) * 2^-52
double default_pinv_rtol(Index m, Index n);

/// Returns X^+ B, treating singular values <= rtol * sigma_1 as zero.
/// A negative rtol selects default_pinv_rtol.
DenseMatrix pinv_apply(const DenseMatrix& X, const DenseMatrix& B, double rtol = -1.0);

struct PolarFactors {
  DenseMatrix Q;  // m x n, orthonormal columns
  DenseMatrix H;  // n x n, symmetric positive semidefinite
};

/// Classical polar decomposition X = Q H via the SVD (Q = U V^T, H = V S V^T).
PolarFactors polar_factors(const DenseMatrix& X);

struct SpectralNormOptions {
  /// min(m, n) <= crossover uses the full SVD, larger uses power iteration.
  Index crossover = 600;
  double tol = 1e-9;
  int max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
};

/// Throws NumericalError (carrying the last estimate) when power iteration
/// does not converge.
double spectral_norm(const DenseMatrix& X, const SpectralNormOptions& opts = {});
double spectral_norm(const Matrix& X, const SpectralNormOptions& opts = {});
double fro_norm(const DenseMatrix& X);

/// Orthonormal basis of Range(X): left singular vectors whose singular value
/// exceeds rtol * sigma_1 (negative rtol: default_pinv_rtol).
DenseMatrix range_basis(const DenseMatrix& X, double rtol = -1.0);

/// ||X^T X - I||_2 for a matrix with few columns.
double gram_deviation(const DenseMatrix& X);

}  // namespace sketchsvd
