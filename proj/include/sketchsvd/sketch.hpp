#pragma once

// Oblivious subspace-embedding operators S: R^m -> R^s.
//
// Three kinds are provided:
//   gaussian     dense i.i.d. N(0, 1/s) entries, so E||Sv||^2 = ||v||^2;
//   srtt         sqrt(m/s) * D * F * E with a Rademacher sign diagonal E, the
//                orthonormal DCT-II F and uniform row sampling D without
//                replacement;
//   sparse-sign  zeta = min(8, s) nonzeros per column at distinct rows, each
//                +-1/sqrt(zeta).
//
// All randomness is drawn at construction from std::mt19937_64 seeded with
// the operator seed, through boost::random distributions (whose algorithms,
// unlike the std:: ones, are fixed across platforms). Operators are immutable
// and safe to share between threads.

#include "sketchsvd/matrix.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchsvd {

enum class SketchKind { gaussian, srtt, sparse_sign };

std::string_view to_string(SketchKind kind);
/// Accepts "gaussian", "srtt", "sparse-sign". Throws invalid_argument otherwise.
SketchKind parse_sketch_kind(std::string_view name);

/// Parameters of an (epsilon, delta, k)-subspace embedding of a k-dimensional
/// subspace of R^m.
struct EmbeddingSpec {
  double epsilon = 0.5;
  double delta = 0.01;
  Index k = 1;
  Index m = 1;
  SketchKind kind = SketchKind::gaussian;

  void validate() const;
};

/// Sketch dimension for the requested embedding, clamped to [k, m].
///   gaussian:            ceil(eps^-2 ln(1/delta) ln(max(k, 2)))
///   srtt / sparse-sign:  max(2k, ceil(c eps^-2 k))
Index sketch_dim(const EmbeddingSpec& spec, double c = 1.0);

/// Derives the seed of repetition `index` from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class SketchOperator {
 public:
  /// Gaussian operators whose table exceeds this many entries are regenerated
  /// column by column on every apply instead of being stored. Column i is
  /// drawn from its own stream seeded with derive_seed(seed, i).
  static constexpr std::int64_t kMaxStoredGaussianEntries = std::int64_t{1} << 22;

  SketchOperator(SketchKind kind, Index s, Index m, std::uint64_t seed,
                 std::optional<bool> store_gaussian = std::nullopt);

  SketchKind kind() const { return kind_; }
  Index rows() const { return s_; }  // s
  Index cols() const { return m_; }  // m
  std::uint64_t seed() const { return seed_; }

  /// S * X. Sparse X is never densified by the gaussian and sparse-sign kinds.
  DenseMatrix apply(const Matrix& X) const;
  DenseMatrix apply(const DenseMatrix& X) const;
  Vector apply(const Vector& x) const;

  /// O(m^2)-per-column reference product (srtt uses a direct cosine sum,
  /// the other kinds the stored entries); for testing the fast paths.
  DenseMatrix apply_reference(const DenseMatrix& X) const;

  /// Dense s x m table of S.
  DenseMatrix materialize() const;

  // srtt internals, exposed for tests.
  const std::vector<double>& srtt_signs() const;
  const std::vector<Index>& srtt_rows() const;
  // sparse-sign internals: zeta row indices / values per column, column-major.
  Index sparse_sign_zeta() const;
  const std::vector<Index>& sparse_sign_rows() const;
  const std::vector<double>& sparse_sign_values() const;

 private:
  struct State;
  SketchKind kind_;
  Index s_;
  Index m_;
  std::uint64_t seed_;
  std::shared_ptr<const State> state_;

  DenseMatrix apply_gaussian(const Matrix& X) const;
  DenseMatrix apply_srtt(const DenseMatrix& X) const;
  DenseMatrix apply_sparse_sign(const Matrix& X) const;
};

SketchOperator build_sketch(SketchKind kind, Index s, Index m, std::uint64_t seed);

/// Orthonormal DCT-II of each column (fast path, any length).
DenseMatrix dct2_orthonormal(const DenseMatrix& X);
/// Same transform by direct summation, O(m^2) per column.
DenseMatrix dct2_orthonormal_reference(const DenseMatrix& X);

/// Measured distortion of S over Range(U):
///   epsilon_emp = max(sigma_max(SU)^2 - 1, 1 - sigma_min(SU)^2),
/// the tightest epsilon for which (1-eps)|v|^2 <= |Sv|^2 <= (1+eps)|v|^2 holds
/// on the subspace.
struct EmbeddingCertificate {
  double epsilon_emp = 0.0;
  Index subspace_dim = 0;
  double sigma_min_SU = 1.0;
  double sigma_max_SU = 1.0;
};

/// U must have orthonormal columns (||U^T U - I||_2 <= 1e-10).
EmbeddingCertificate empirical_epsilon(const SketchOperator& op, const DenseMatrix& U);

/// Certificate over Range(X), using an orthonormal basis from the SVD of X.
EmbeddingCertificate certify_range(const SketchOperator& op, const DenseMatrix& X, double rtol = -1.0);
EmbeddingCertificate certify_range(const SketchOperator& op, const Matrix& X, double rtol = -1.0);

struct CosineAudit {
  double max_abs_cosine = 0.0;
  double epsilon_emp = 0.0;  // measured over Range(P)
  bool within_bound = false;  // max_abs_cosine <= epsilon_emp
};

/// For P with S-orthonormal columns, bounds the ordinary pairwise cosines by
/// the distortion over Range(P).
CosineAudit pairwise_cosine_audit(const SketchOperator& op, const DenseMatrix& P);

}  // namespace sketchsvd
