#pragma once

// Nearest S^T S-orthogonal matrix (randomized polar decomposition), the
// classical nearest orthogonal matrix, and the bound reports relating them.

#include "sketchsvd/stssvd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sketchsvd {

enum class PolarMode { s_orthogonal, orthogonal };

/// A = P H with H symmetric positive semidefinite. In s_orthogonal mode P has
/// S^T S-orthonormal columns, in orthogonal mode ordinary orthonormal ones.
struct PolarPair {
  DenseMatrix P;
  DenseMatrix H;
  PolarMode mode = PolarMode::orthogonal;
};

/// P = W V^T, H = V Theta V^T. A must have full column rank (r = n).
PolarPair nearest_sts_orthogonal(const Matrix& A, const SketchOperator& op, double rtol = -1.0);
PolarPair nearest_sts_orthogonal(const StsSvdFactors& f);

/// T = U Y^T, H = Y Sigma Y^T from the standard SVD A = U Sigma Y^T.
PolarPair nearest_orthogonal(const Matrix& A);

/// S^T S-polar decomposition of a matrix T with orthonormal columns:
/// H = ((ST)^T ST)^(1/2), Q_T = T H^-1.
PolarPair sts_polar_of_orthonormal(const DenseMatrix& T, const SketchOperator& op);

/// One checked inequality lhs <= rhs (+1e-10 absolute slack).
struct BoundReport {
  std::string bound_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double epsilon = 0.0;
  bool pass = false;
  std::string provenance;
  std::string matrix_id;
  Index s = 0;
  std::uint64_t seed = 0;
};

constexpr double kBoundSlack = 1e-10;

BoundReport make_bound(std::string id, double lhs, double rhs, double epsilon, std::string provenance);

/// eps / (1 - eps), +inf for eps >= 1.
double distortion_ratio(double epsilon);

std::string bound_csv_header();
std::string to_csv_row(const BoundReport& b);
std::string to_json_line(const BoundReport& b);

/// Loss-of-orthogonality bounds for P, evaluated at cert.epsilon_emp (or at
/// `epsilon` when given). P is classified as S-orthonormal and/or orthonormal
/// (tolerance 1e-6); a matrix that is neither raises a precondition error.
std::vector<BoundReport> orthogonality_report(const DenseMatrix& P, const SketchOperator& op,
                                              const EmbeddingCertificate& cert,
                                              std::optional<double> epsilon = std::nullopt);

struct SandwichReport {
  double dist_A_P = 0.0;  // ||A - P||_2
  double dist_A_T = 0.0;  // ||A - T||_2
  double dist_P_T = 0.0;  // ||P - T||_2
  double epsilon = 0.0;   // epsilon used for the lower/upper checks
  BoundReport lower;      // ||A-T||_2 - eps/(1-eps) <= ||A-P||_2
  BoundReport upper;      // ||A-P||_2 <= (1+eps)/(1-eps) ||A-T||_2 + eps/(1-eps)
  /// Sandwich re-evaluated at the distortion measured over Range(A - T) only.
  /// A violation there is flagged, never a failure.
  double epsilon_narrow = 0.0;
  bool narrow_pass = true;

  bool pass() const { return lower.pass && upper.pass; }
};

/// Sandwich between the nearest S^T S-orthogonal and nearest orthogonal
/// solutions. By default epsilon is measured over Range(A), which contains
/// Range(T), Range(Q_T), Range(P) and Range(A - T) for full-rank A.
SandwichReport nearest_sandwich_report(const Matrix& A, const SketchOperator& op,
                                       std::optional<double> epsilon = std::nullopt);
/// Same, reusing a precomputed classical solution T and the dense A.
SandwichReport nearest_sandwich_report(const DenseMatrix& A, const PolarPair& classical, const SketchOperator& op,
                                       std::optional<double> epsilon = std::nullopt);
/// Same, with the S^T S-orthogonal solution P also precomputed (with op).
SandwichReport nearest_sandwich_report(const DenseMatrix& A, const PolarPair& classical, const PolarPair& sts,
                                       const SketchOperator& op, std::optional<double> epsilon = std::nullopt);

}  // namespace sketchsvd
