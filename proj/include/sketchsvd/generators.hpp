#pragma once

#include "sketchsvd/matrix.hpp"

#include <cstdint>

namespace sketchsvd {

/// C(i,j) = 1 / (x_i + y_j) with x, y equispaced (endpoints included) on the
/// two intervals.
struct CauchySpec {
  Index n = 200;
  double x_lo = 2.0;
  double x_hi = 100.0;
  double y_lo = -1000.0;
  double y_hi = -500.0;
};

Matrix gen_cauchy(const CauchySpec& spec);

/// Random sparse m x n matrix with round(density*m) (at least one) nonzeros per
/// column at distinct rows, values uniform on [-1, 1], columns scaled by the
/// geometric ladder kappa^(-j/(n-1)) so that cond_2 is close to kappa.
Matrix gen_sparse_conditioned(Index m, Index n, double density, double kappa, std::uint64_t seed);

/// Dense m x n matrix of independent standard normal entries.
DenseMatrix gen_gaussian(Index m, Index n, std::uint64_t seed);

/// m x n matrix with orthonormal columns (QR of a gaussian matrix).
DenseMatrix gen_orthonormal(Index m, Index n, std::uint64_t seed);

/// n x n orthogonal matrix, Haar distributed.
DenseMatrix gen_orthogonal(Index n, std::uint64_t seed);

}  // namespace sketchsvd
