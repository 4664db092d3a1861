#include "sketchsvd/generators.hpp"

#include "sketchsvd/dense.hpp"
#include "sketchsvd/error.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>
#include <vector>

namespace sketchsvd {

Matrix gen_cauchy(const CauchySpec& spec) {
  require(spec.n >= 2, ErrorCode::invalid_argument, "gen_cauchy: n must be at least 2");
  const Index n = spec.n;
  const double step = 1.0 / static_cast<double>(n - 1);
  DenseMatrix C(n, n);
  for (Index j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * step;
    const double y = j == n - 1 ? spec.y_hi : spec.y_lo + (spec.y_hi - spec.y_lo) * t;
    for (Index i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) * step;
      const double x = i == n - 1 ? spec.x_hi : spec.x_lo + (spec.x_hi - spec.x_lo) * u;
      const double d = x + y;
      require(d != 0.0, ErrorCode::invalid_argument, "gen_cauchy: x_i + y_j = 0 for some i, j");
      C(i, j) = 1.0 / d;
    }
  }
  return Matrix(std::move(C));
}

Matrix gen_sparse_conditioned(Index m, Index n, double density, double kappa, std::uint64_t seed) {
  require(m >= 1 && n >= 1, ErrorCode::invalid_argument, "gen_sparse_conditioned: empty shape");
  require(density > 0.0 && density <= 1.0, ErrorCode::invalid_argument, "gen_sparse_conditioned: density must lie in (0,1]");
  require(kappa >= 1.0, ErrorCode::invalid_argument, "gen_sparse_conditioned: kappa must be at least 1");
  std::mt19937_64 eng(seed);
  boost::random::uniform_real_distribution<double> value(-1.0, 1.0);
  // Too low a density would leave empty columns; each column keeps at least
  // one entry, placed on the diagonal pattern j mod m.
  const Index per_col = std::llround(density * static_cast<double>(m));

  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(static_cast<std::size_t>(std::max<Index>(per_col, 1) * n));
  std::unordered_set<Index> chosen;
  for (Index j = 0; j < n; ++j) {
    const double scale = n > 1 ? std::pow(kappa, -static_cast<double>(j) / static_cast<double>(n - 1)) : 1.0;
    if (per_col == 0) {
      triplets.emplace_back(j % m, j, scale * value(eng));
      continue;
    }
    // Floyd's sampling of per_col distinct rows.
    chosen.clear();
    for (Index t = m - per_col; t < m; ++t) {
      boost::random::uniform_int_distribution<Index> pick(0, t);
      const Index r = pick(eng);
      chosen.insert(chosen.count(r) ? t : r);
    }
    std::vector<Index> rows(chosen.begin(), chosen.end());
    std::sort(rows.begin(), rows.end());
    for (Index r : rows) triplets.emplace_back(r, j, scale * value(eng));
  }
  SparseMatrix A(m, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return Matrix(std::move(A));
}

DenseMatrix gen_gaussian(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> normal;
  DenseMatrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) A(i, j) = normal(eng);
  }
  return A;
}

DenseMatrix gen_orthonormal(Index m, Index n, std::uint64_t seed) {
  require(m >= n, ErrorCode::shape, "gen_orthonormal: requires m >= n");
  return householder_qr(gen_gaussian(m, n, seed)).Q;
}

DenseMatrix gen_orthogonal(Index n, std::uint64_t seed) { return gen_orthonormal(n, n, seed); }

}  // namespace sketchsvd
