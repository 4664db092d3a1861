#include "sketchsvd/sketch.hpp"

#include "sketchsvd/dense.hpp"
#include "sketchsvd/error.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fftw3.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

namespace sketchsvd {

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::gaussian:
      return "gaussian";
    case SketchKind::srtt:
      return "srtt";
    case SketchKind::sparse_sign:
      return "sparse-sign";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "gaussian") return SketchKind::gaussian;
  if (name == "srtt") return SketchKind::srtt;
  if (name == "sparse-sign") return SketchKind::sparse_sign;
  fail(ErrorCode::invalid_argument, "unknown sketch kind '" + std::string(name) + "'");
}

void EmbeddingSpec::validate() const {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::invalid_argument, "embedding spec: epsilon must lie in (0,1)");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "embedding spec: delta must lie in (0,1)");
  require(k >= 1 && k <= m, ErrorCode::invalid_argument, "embedding spec: need 1 <= k <= m");
}

Index sketch_dim(const EmbeddingSpec& spec, double c) {
  spec.validate();
  require(c > 0.0, ErrorCode::invalid_argument, "sketch_dim: constant c must be positive");
  const double inv_eps2 = 1.0 / (spec.epsilon * spec.epsilon);
  double s = 0.0;
  if (spec.kind == SketchKind::gaussian) {
    s = std::ceil(inv_eps2 * std::log(1.0 / spec.delta) * std::log(static_cast<double>(std::max<Index>(spec.k, 2))));
  } else {
    s = std::max(2.0 * static_cast<double>(spec.k), std::ceil(c * inv_eps2 * static_cast<double>(spec.k)));
  }
  s = std::min(s, static_cast<double>(spec.m));
  return std::clamp(static_cast<Index>(s), spec.k, spec.m);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(master ^ splitmix(index));
}

struct SketchOperator::State {
  // gaussian
  DenseMatrix table;  // empty when regenerated on demand
  // srtt
  std::vector<double> signs;
  std::vector<Index> rows;
  double scale = 1.0;
  // sparse-sign
  Index zeta = 0;
  std::vector<Index> nz_rows;
  std::vector<double> nz_values;
};

namespace {

// Column i of a gaussian operator is drawn from its own stream seeded with
// derive_seed(seed, i), so any column can be produced independently.
void gaussian_column(Index s, std::uint64_t seed, Index i, double* col) {
  std::mt19937_64 eng(derive_seed(seed, static_cast<std::uint64_t>(i)));
  boost::random::normal_distribution<double> normal;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s));
  for (Index r = 0; r < s; ++r) col[r] = normal(eng) * scale;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

SketchOperator::SketchOperator(SketchKind kind, Index s, Index m, std::uint64_t seed, std::optional<bool> store_gaussian)
    : kind_(kind), s_(s), m_(m), seed_(seed) {
  if (s <= 0 || s > m) {
    std::ostringstream msg;
    msg << "sketch dimension s=" << s << " must satisfy 1 <= s <= m=" << m;
    fail(ErrorCode::invalid_dimension, msg.str());
  }
  auto st = std::make_shared<State>();
  switch (kind) {
    case SketchKind::gaussian: {
      const bool store = store_gaussian.value_or(s * m <= kMaxStoredGaussianEntries);
      if (store) {
        st->table.resize(s, m);
        for (Index i = 0; i < m; ++i) gaussian_column(s, seed, i, st->table.col(i).data());
      }
      break;
    }
    case SketchKind::srtt: {
      std::mt19937_64 eng(seed);
      boost::random::uniform_int_distribution<int> coin(0, 1);
      st->signs.resize(static_cast<std::size_t>(m));
      for (auto& e : st->signs) e = coin(eng) ? 1.0 : -1.0;
      std::vector<Index> perm(static_cast<std::size_t>(m));
      std::iota(perm.begin(), perm.end(), Index{0});
      for (Index i = 0; i < s; ++i) {
        boost::random::uniform_int_distribution<Index> pick(i, m - 1);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(eng))]);
      }
      st->rows.assign(perm.begin(), perm.begin() + s);
      st->scale = std::sqrt(static_cast<double>(m) / static_cast<double>(s));
      break;
    }
    case SketchKind::sparse_sign: {
      std::mt19937_64 eng(seed);
      boost::random::uniform_int_distribution<Index> row(0, s - 1);
      boost::random::uniform_int_distribution<int> coin(0, 1);
      st->zeta = std::min<Index>(8, s);
      const double v = 1.0 / std::sqrt(static_cast<double>(st->zeta));
      st->nz_rows.reserve(static_cast<std::size_t>(m * st->zeta));
      st->nz_values.reserve(static_cast<std::size_t>(m * st->zeta));
      for (Index i = 0; i < m; ++i) {
        const std::size_t begin = st->nz_rows.size();
        while (static_cast<Index>(st->nz_rows.size() - begin) < st->zeta) {
          const Index r = row(eng);
          if (std::find(st->nz_rows.begin() + static_cast<std::ptrdiff_t>(begin), st->nz_rows.end(), r) !=
              st->nz_rows.end())
            continue;
          st->nz_rows.push_back(r);
          st->nz_values.push_back(coin(eng) ? v : -v);
        }
      }
      break;
    }
  }
  state_ = std::move(st);
}

SketchOperator build_sketch(SketchKind kind, Index s, Index m, std::uint64_t seed) {
  return SketchOperator(kind, s, m, seed);
}

const std::vector<double>& SketchOperator::srtt_signs() const { return state_->signs; }
const std::vector<Index>& SketchOperator::srtt_rows() const { return state_->rows; }
Index SketchOperator::sparse_sign_zeta() const { return state_->zeta; }
const std::vector<Index>& SketchOperator::sparse_sign_rows() const { return state_->nz_rows; }
const std::vector<double>& SketchOperator::sparse_sign_values() const { return state_->nz_values; }

DenseMatrix SketchOperator::apply(const Matrix& X) const {
  require(X.rows() == m_, ErrorCode::shape, "sketch apply: input row count differs from operator ambient dimension");
  switch (kind_) {
    case SketchKind::gaussian:
      return apply_gaussian(X);
    case SketchKind::srtt:
      return X.is_sparse() ? apply_srtt(X.to_dense()) : apply_srtt(X.dense());
    case SketchKind::sparse_sign:
      return apply_sparse_sign(X);
  }
  return {};
}

DenseMatrix SketchOperator::apply(const DenseMatrix& X) const {
  require(X.rows() == m_, ErrorCode::shape, "sketch apply: input row count differs from operator ambient dimension");
  if (kind_ == SketchKind::srtt) return apply_srtt(X);
  return apply(Matrix(X));
}

Vector SketchOperator::apply(const Vector& x) const {
  const DenseMatrix X = x;
  return apply(X).col(0);
}

DenseMatrix SketchOperator::apply_gaussian(const Matrix& X) const {
  const Index n = X.cols();
  const DenseMatrix& table = state_->table;
  if (table.size() > 0) {
    if (!X.is_sparse()) return table * X.dense();
    DenseMatrix out = DenseMatrix::Zero(s_, n);
    const SparseMatrix& A = X.sparse();
    for (Index i = 0; i < A.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) out.col(it.col()) += it.value() * table.col(i);
    }
    return out;
  }
  DenseMatrix out = DenseMatrix::Zero(s_, n);
  if (X.is_sparse()) {
    const SparseMatrix& A = X.sparse();
    Vector g(s_);
    for (Index i = 0; i < m_; ++i) {
      SparseMatrix::InnerIterator it(A, i);
      if (!it) continue;
      gaussian_column(s_, seed_, i, g.data());
      for (; it; ++it) out.col(it.col()) += it.value() * g;
    }
  } else {
    const DenseMatrix& A = X.dense();
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) {
      if ((A.row(i).array() != 0.0).any()) rows.push_back(i);
    }
    const Index nz = static_cast<Index>(rows.size());
    constexpr Index kBlock = 256;
    DenseMatrix block(s_, kBlock);
    DenseMatrix gathered(kBlock, n);
    for (Index b0 = 0; b0 < nz; b0 += kBlock) {
      const Index w = std::min(kBlock, nz - b0);
      for (Index c = 0; c < w; ++c) {
        const Index i = rows[static_cast<std::size_t>(b0 + c)];
        gaussian_column(s_, seed_, i, block.col(c).data());
        gathered.row(c) = A.row(i);
      }
      out.noalias() += block.leftCols(w) * gathered.topRows(w);
    }
  }
  return out;
}

DenseMatrix SketchOperator::apply_srtt(const DenseMatrix& X) const {
  const Index n = X.cols();
  DenseMatrix buf(m_, n);
  const Eigen::Map<const Vector> signs(state_->signs.data(), m_);
  for (Index j = 0; j < n; ++j) buf.col(j) = X.col(j).cwiseProduct(signs);
  buf = dct2_orthonormal(buf);
  DenseMatrix out(s_, n);
  for (Index r = 0; r < s_; ++r) out.row(r) = state_->scale * buf.row(state_->rows[static_cast<std::size_t>(r)]);
  return out;
}

DenseMatrix SketchOperator::apply_sparse_sign(const Matrix& X) const {
  const Index n = X.cols();
  const Index zeta = state_->zeta;
  const Index* rows = state_->nz_rows.data();
  const double* vals = state_->nz_values.data();
  DenseMatrix out = DenseMatrix::Zero(s_, n);
  if (X.is_sparse()) {
    const SparseMatrix& A = X.sparse();
    for (Index i = 0; i < A.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
        for (Index t = 0; t < zeta; ++t) out(rows[i * zeta + t], it.col()) += vals[i * zeta + t] * it.value();
      }
    }
    return out;
  }
  const DenseMatrix& A = X.dense();
  for (Index j = 0; j < n; ++j) {
    double* o = out.col(j).data();
    const double* a = A.col(j).data();
    for (Index i = 0; i < m_; ++i) {
      const double x = a[i];
      if (x == 0.0) continue;
      for (Index t = 0; t < zeta; ++t) o[rows[i * zeta + t]] += vals[i * zeta + t] * x;
    }
  }
  return out;
}

DenseMatrix SketchOperator::materialize() const {
  switch (kind_) {
    case SketchKind::gaussian: {
      if (state_->table.size() > 0) return state_->table;
      DenseMatrix S(s_, m_);
      for (Index i = 0; i < m_; ++i) gaussian_column(s_, seed_, i, S.col(i).data());
      return S;
    }
    case SketchKind::srtt:
      return apply_srtt(DenseMatrix::Identity(m_, m_));
    case SketchKind::sparse_sign: {
      DenseMatrix S = DenseMatrix::Zero(s_, m_);
      const Index zeta = state_->zeta;
      for (Index i = 0; i < m_; ++i) {
        for (Index t = 0; t < zeta; ++t) {
          S(state_->nz_rows[static_cast<std::size_t>(i * zeta + t)], i) =
              state_->nz_values[static_cast<std::size_t>(i * zeta + t)];
        }
      }
      return S;
    }
  }
  return {};
}

DenseMatrix SketchOperator::apply_reference(const DenseMatrix& X) const {
  require(X.rows() == m_, ErrorCode::shape, "sketch apply: input row count differs from operator ambient dimension");
  if (kind_ != SketchKind::srtt) return materialize() * X;
  DenseMatrix buf(m_, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < m_; ++i) buf(i, j) = state_->signs[static_cast<std::size_t>(i)] * X(i, j);
  }
  buf = dct2_orthonormal_reference(buf);
  DenseMatrix out(s_, X.cols());
  for (Index r = 0; r < s_; ++r) out.row(r) = state_->scale * buf.row(state_->rows[static_cast<std::size_t>(r)]);
  return out;
}

DenseMatrix dct2_orthonormal(const DenseMatrix& X) {
  const Index m = X.rows();
  const Index n = X.cols();
  DenseMatrix Y = X;
  if (m == 0 || n == 0) return Y;
  require(m <= INT_MAX && n <= INT_MAX, ErrorCode::invalid_dimension, "dct: dimensions exceed FFTW int range");
  int len = static_cast<int>(m);
  const fftw_r2r_kind kind = FFTW_REDFT10;
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_many_r2r(1, &len, static_cast<int>(n), Y.data(), nullptr, 1, len, Y.data(), nullptr, 1, len, &kind,
                              FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorCode::numerical_failure, "dct: FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  // REDFT10 computes 2 * sum_i x_i cos(pi (2i+1) k / (2m)).
  const double md = static_cast<double>(m);
  Y.row(0) *= std::sqrt(1.0 / (4.0 * md));
  if (m > 1) Y.bottomRows(m - 1) *= std::sqrt(1.0 / (2.0 * md));
  return Y;
}

DenseMatrix dct2_orthonormal_reference(const DenseMatrix& X) {
  const Index m = X.rows();
  const Index n = X.cols();
  DenseMatrix Y(m, n);
  if (m == 0) return Y;
  // cos(pi t / (2m)) for t in [0, 4m); (2i+1) k is reduced mod 4m exactly.
  std::vector<double> table(static_cast<std::size_t>(4 * m));
  const double pi = std::acos(-1.0);
  for (Index t = 0; t < 4 * m; ++t) table[static_cast<std::size_t>(t)] = std::cos(pi * static_cast<double>(t) / (2.0 * m));
  const double w0 = std::sqrt(1.0 / static_cast<double>(m));
  const double wk = std::sqrt(2.0 / static_cast<double>(m));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < m; ++k) {
      long double acc = 0.0L;
      for (Index i = 0; i < m; ++i) {
        const Index t = ((2 * i + 1) * k) % (4 * m);
        acc += static_cast<long double>(X(i, j)) * table[static_cast<std::size_t>(t)];
      }
      Y(k, j) = (k == 0 ? w0 : wk) * static_cast<double>(acc);
    }
  }
  return Y;
}

EmbeddingCertificate empirical_epsilon(const SketchOperator& op, const DenseMatrix& U) {
  require(U.rows() == op.cols(), ErrorCode::shape, "empirical_epsilon: basis row count differs from operator m");
  EmbeddingCertificate cert;
  cert.subspace_dim = U.cols();
  if (U.cols() == 0) return cert;
  const double dev = gram_deviation(U);
  if (!(dev <= 1e-10)) {
    std::ostringstream msg;
    msg << "empirical_epsilon: basis is not orthonormal (||U^T U - I||_2 = " << dev << ")";
    fail(ErrorCode::precondition, msg.str());
  }
  const DenseMatrix SU = op.apply(U);
  const Vector sv = singular_values(SU);
  cert.sigma_max_SU = sv(0);
  cert.sigma_min_SU = SU.rows() < U.cols() ? 0.0 : sv(U.cols() - 1);
  cert.epsilon_emp = std::max({cert.sigma_max_SU * cert.sigma_max_SU - 1.0, 1.0 - cert.sigma_min_SU * cert.sigma_min_SU, 0.0});
  return cert;
}

EmbeddingCertificate certify_range(const SketchOperator& op, const DenseMatrix& X, double rtol) {
  return empirical_epsilon(op, range_basis(X, rtol));
}

EmbeddingCertificate certify_range(const SketchOperator& op, const Matrix& X, double rtol) {
  if (!X.is_sparse()) return certify_range(op, X.dense(), rtol);
  return certify_range(op, X.to_dense(), rtol);
}

CosineAudit pairwise_cosine_audit(const SketchOperator& op, const DenseMatrix& P) {
  require(P.rows() == op.cols(), ErrorCode::shape, "pairwise_cosine_audit: row count differs from operator m");
  for (Index j = 0; j < P.cols(); ++j) {
    if (P.col(j).norm() == 0.0) {
      fail(ErrorCode::degenerate_input, "pairwise_cosine_audit: column " + std::to_string(j + 1) + " is zero");
    }
  }
  const double dev = gram_deviation(op.apply(P));
  if (!(dev <= 1e-8)) {
    std::ostringstream msg;
    msg << "pairwise_cosine_audit: columns are not S-orthonormal (||(SP)^T SP - I||_2 = " << dev << ")";
    fail(ErrorCode::precondition, msg.str());
  }
  DenseMatrix Pn = P;
  Pn.colwise().normalize();
  const DenseMatrix C = Pn.transpose() * Pn;
  CosineAudit audit;
  for (Index i = 0; i < C.rows(); ++i) {
    for (Index j = 0; j < C.cols(); ++j) {
      if (i != j) audit.max_abs_cosine = std::max(audit.max_abs_cosine, std::abs(C(i, j)));
    }
  }
  audit.epsilon_emp = certify_range(op, P).epsilon_emp;
  audit.within_bound = audit.max_abs_cosine <= audit.epsilon_emp;
  return audit;
}

}  // namespace sketchsvd
