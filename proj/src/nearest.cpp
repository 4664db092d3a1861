#include "sketchsvd/nearest.hpp"

#include "sketchsvd/error.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sketchsvd {

namespace {

DenseMatrix symmetrize(const DenseMatrix& H) { return 0.5 * (H + H.transpose()); }

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

PolarPair nearest_sts_orthogonal(const StsSvdFactors& f) {
  const Index n = f.V.rows();
  if (f.rank != n) {
    std::ostringstream msg;
    msg << "nearest_sts_orthogonal: A must have full column rank (retained rank " << f.rank << " of " << n << ")";
    fail(ErrorCode::rank_deficient, msg.str());
  }
  return {f.W * f.V.transpose(), symmetrize(f.V * f.theta.asDiagonal() * f.V.transpose()), PolarMode::s_orthogonal};
}

PolarPair nearest_sts_orthogonal(const Matrix& A, const SketchOperator& op, double rtol) {
  return nearest_sts_orthogonal(sts_svd(A, op, rtol));
}

PolarPair nearest_orthogonal(const Matrix& A) {
  require(A.rows() >= A.cols(), ErrorCode::shape, "nearest_orthogonal: requires rows >= cols");
  PolarFactors pf = polar_factors(A.is_sparse() ? A.to_dense() : A.dense());
  return {std::move(pf.Q), std::move(pf.H), PolarMode::orthogonal};
}

PolarPair sts_polar_of_orthonormal(const DenseMatrix& T, const SketchOperator& op) {
  const double dev = gram_deviation(T);
  if (!(dev <= 1e-10)) {
    std::ostringstream msg;
    msg << "sts_polar_of_orthonormal: T is not orthonormal (||T^T T - I||_2 = " << dev << ")";
    fail(ErrorCode::precondition, msg.str());
  }
  const Index n = T.cols();
  const DenseMatrix ST = op.apply(T);
  // (ST)^T ST = V diag(sigma^2) V^T, so H = V diag(sigma) V^T.
  const SvdFactors f = jacobi_svd(ST);
  const double floor = static_cast<double>(std::max<Index>(n, 1)) * 0x1p-52 * (n > 0 ? f.sigma(0) : 0.0);
  if (n > 0 && (f.sigma.size() < n || !(f.sigma(n - 1) > floor))) {
    fail(ErrorCode::numerical_failure, "sts_polar_of_orthonormal: (ST)^T ST is singular (embedding failed on Range(T))");
  }
  PolarPair out;
  out.mode = PolarMode::s_orthogonal;
  out.H = symmetrize(f.V * f.sigma.asDiagonal() * f.V.transpose());
  out.P = T * (f.V * f.sigma.cwiseInverse().asDiagonal() * f.V.transpose());
  return out;
}

double distortion_ratio(double epsilon) {
  if (epsilon >= 1.0) return std::numeric_limits<double>::infinity();
  return epsilon / (1.0 - epsilon);
}

BoundReport make_bound(std::string id, double lhs, double rhs, double epsilon, std::string provenance) {
  BoundReport b;
  b.bound_id = std::move(id);
  b.lhs = lhs;
  b.rhs = rhs;
  b.epsilon = epsilon;
  b.pass = lhs <= rhs + kBoundSlack;
  b.provenance = std::move(provenance);
  return b;
}

std::string bound_csv_header() { return "bound_id,lhs,rhs,epsilon,pass,matrix_id,s,seed"; }

std::string to_csv_row(const BoundReport& b) {
  std::ostringstream os;
  os << b.bound_id << ',' << format_double(b.lhs) << ',' << format_double(b.rhs) << ',' << format_double(b.epsilon)
     << ',' << (b.pass ? "true" : "false") << ',' << b.matrix_id << ',' << b.s << ',' << b.seed;
  return os.str();
}

std::string to_json_line(const BoundReport& b) {
  nlohmann::json j = {{"bound_id", b.bound_id}, {"lhs", b.lhs},         {"rhs", b.rhs}, {"epsilon", b.epsilon},
                      {"pass", b.pass},         {"matrix_id", b.matrix_id}, {"s", b.s},     {"seed", b.seed}};
  return j.dump();
}

std::vector<BoundReport> orthogonality_report(const DenseMatrix& P, const SketchOperator& op,
                                              const EmbeddingCertificate& cert, std::optional<double> epsilon) {
  const double eps = epsilon.value_or(cert.epsilon_emp);
  const double ratio = distortion_ratio(eps);
  const Index n = P.cols();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const DenseMatrix SP = op.apply(P);
  const DenseMatrix I = DenseMatrix::Identity(n, n);
  const DenseMatrix gram = P.transpose() * P - I;
  const DenseMatrix sgram = SP.transpose() * SP - I;
  const double gram_two = n > 0 ? spectral_norm(gram) : 0.0;
  const double sgram_two = n > 0 ? spectral_norm(sgram) : 0.0;
  const bool s_orthonormal = sgram_two <= 1e-6;
  const bool orthonormal = gram_two <= 1e-6;
  if (!s_orthonormal && !orthonormal) {
    std::ostringstream msg;
    msg << "orthogonality_report: P is neither S-orthonormal (" << sgram_two << ") nor orthonormal (" << gram_two
        << ")";
    fail(ErrorCode::precondition, msg.str());
  }

  std::vector<BoundReport> out;
  if (s_orthonormal) {
    out.push_back(make_bound("s_orthonormal_gram_2", gram_two, ratio, eps,
                             "||P^T P - I||_2 <= eps/(1-eps) for S-orthonormal P"));
    out.push_back(make_bound("s_orthonormal_gram_fro", gram.norm(), sqrt_n * ratio, eps,
                             "||P^T P - I||_F <= sqrt(n) eps/(1-eps) for S-orthonormal P"));
    const PolarFactors pf = polar_factors(P);
    const double dist = spectral_norm(DenseMatrix(P - pf.Q));
    out.push_back(make_bound("higham_lower", gram_two / (spectral_norm(P) + 1.0), dist, eps,
                             "||P^T P - I||_2 / (||P||_2 + 1) <= ||P - Q_P||_2"));
    out.push_back(make_bound("higham_upper", dist, gram_two, eps, "||P - Q_P||_2 <= ||P^T P - I||_2"));
    out.push_back(make_bound("polar_distance", dist, ratio, eps, "||P - Q_P||_2 <= eps/(1-eps)"));
  }
  if (orthonormal) {
    out.push_back(make_bound("orthonormal_sketched_gram_2", sgram_two, eps, eps,
                             "||T^T S^T S T - I||_2 <= eps for orthonormal T"));
    out.push_back(make_bound("orthonormal_sketched_gram_fro", sgram.norm(), eps * sqrt_n, eps,
                             "||T^T S^T S T - I||_F <= eps sqrt(n) for orthonormal T"));
    const PolarPair q = sts_polar_of_orthonormal(P, op);
    out.push_back(make_bound("sts_polar_distance", spectral_norm(op.apply(DenseMatrix(P - q.P))), eps, eps,
                             "||T - Q_T||_{S,2} <= eps"));
  }
  for (auto& b : out) {
    b.s = op.rows();
    b.seed = op.seed();
  }
  return out;
}

namespace {

void evaluate_sandwich(double dist_A_P, double dist_A_T, double eps, BoundReport& lower, BoundReport& upper) {
  const double ratio = distortion_ratio(eps);
  const double factor = eps >= 1.0 ? std::numeric_limits<double>::infinity() : (1.0 + eps) / (1.0 - eps);
  lower = make_bound("sandwich_lower", dist_A_T - ratio, dist_A_P, eps, "||A-T||_2 - eps/(1-eps) <= ||A-P||_2");
  upper = make_bound("sandwich_upper", dist_A_P, factor * dist_A_T + ratio, eps,
                     "||A-P||_2 <= (1+eps)/(1-eps) ||A-T||_2 + eps/(1-eps)");
}

}  // namespace

SandwichReport nearest_sandwich_report(const DenseMatrix& A, const PolarPair& classical, const SketchOperator& op,
                                       std::optional<double> epsilon) {
  return nearest_sandwich_report(A, classical, nearest_sts_orthogonal(Matrix(A), op), op, epsilon);
}

SandwichReport nearest_sandwich_report(const DenseMatrix& A, const PolarPair& classical, const PolarPair& sts,
                                       const SketchOperator& op, std::optional<double> epsilon) {
  require(classical.P.rows() == A.rows() && classical.P.cols() == A.cols() && sts.P.rows() == A.rows() &&
              sts.P.cols() == A.cols(),
          ErrorCode::shape, "nearest_sandwich_report: solutions have the wrong shape");
  const DenseMatrix& T = classical.P;

  SandwichReport rep;
  rep.dist_A_P = spectral_norm(DenseMatrix(A - sts.P));
  rep.dist_A_T = spectral_norm(DenseMatrix(A - T));
  rep.dist_P_T = spectral_norm(DenseMatrix(sts.P - T));

  // For full-rank A the orthonormal T spans Range(A); A - T = T (H - I).
  rep.epsilon = epsilon.value_or(empirical_epsilon(op, T).epsilon_emp);
  evaluate_sandwich(rep.dist_A_P, rep.dist_A_T, rep.epsilon, rep.lower, rep.upper);

  const DenseMatrix n_basis = range_basis(classical.H - DenseMatrix::Identity(A.cols(), A.cols()));
  rep.epsilon_narrow = n_basis.cols() > 0 ? empirical_epsilon(op, T * n_basis).epsilon_emp : 0.0;
  BoundReport lo;
  BoundReport hi;
  evaluate_sandwich(rep.dist_A_P, rep.dist_A_T, rep.epsilon_narrow, lo, hi);
  rep.narrow_pass = lo.pass && hi.pass;

  for (BoundReport* b : {&rep.lower, &rep.upper}) {
    b->s = op.rows();
    b->seed = op.seed();
  }
  return rep;
}

SandwichReport nearest_sandwich_report(const Matrix& A, const SketchOperator& op, std::optional<double> epsilon) {
  const PolarPair classical = nearest_orthogonal(A);
  return nearest_sandwich_report(A.to_dense(), classical, op, epsilon);
}

}  // namespace sketchsvd
