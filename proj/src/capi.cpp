#include "sketchsvd/sketchsvd.h"

#include "sketchsvd/error.hpp"
#include "sketchsvd/experiments.hpp"
#include "sketchsvd/generators.hpp"
#include "sketchsvd/io.hpp"
#include "sketchsvd/nearest.hpp"
#include "sketchsvd/stssvd.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

struct sks_matrix {
  sketchsvd::Matrix value;
};
struct sks_sketch {
  sketchsvd::SketchOperator value;
};
struct sks_factors {
  sketchsvd::StsSvdFactors value;
};
struct sks_polar {
  sketchsvd::PolarPair value;
};

namespace {

using namespace sketchsvd;

thread_local std::string last_error;

sks_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return SKS_INVALID_ARGUMENT;
    case ErrorCode::shape: return SKS_SHAPE;
    case ErrorCode::invalid_dimension: return SKS_INVALID_DIMENSION;
    case ErrorCode::precondition: return SKS_PRECONDITION;
    case ErrorCode::rank_deficient: return SKS_RANK_DEFICIENT;
    case ErrorCode::degenerate_input: return SKS_DEGENERATE_INPUT;
    case ErrorCode::numerical_failure: return SKS_NUMERICAL_FAILURE;
    case ErrorCode::parse_error: return SKS_PARSE_ERROR;
    case ErrorCode::unsupported_format: return SKS_UNSUPPORTED_FORMAT;
    case ErrorCode::io_error: return SKS_IO_ERROR;
  }
  return SKS_INTERNAL;
}

template <typename Fn>
sks_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return SKS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SKS_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SKS_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SKS_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " is null");
}

SketchKind kind_of(sks_sketch_kind k) {
  switch (k) {
    case SKS_GAUSSIAN: return SketchKind::gaussian;
    case SKS_SRTT: return SketchKind::srtt;
    case SKS_SPARSE_SIGN: return SketchKind::sparse_sign;
  }
  fail(ErrorCode::invalid_argument, "unknown sketch kind");
}

Command command_of(sks_command c) {
  switch (c) {
    case SKS_CMD_SPECTRUM: return Command::spectrum;
    case SKS_CMD_ORTHO: return Command::ortho;
    case SKS_CMD_NEAREST: return Command::nearest;
  }
  fail(ErrorCode::invalid_argument, "unknown command");
}

void copy_out(const DenseMatrix& X, double* out) {
  need(out, "output buffer");
  std::memcpy(out, X.data(), sizeof(double) * static_cast<std::size_t>(X.size()));
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename T, typename... Args>
void emit(T** out, Args&&... args) {
  need(out, "output handle");
  *out = new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* sks_last_error(void) { return last_error.c_str(); }

const char* sks_status_name(sks_status status) {
  switch (status) {
    case SKS_OK: return "ok";
    case SKS_INVALID_ARGUMENT: return "invalid argument";
    case SKS_SHAPE: return "shape mismatch";
    case SKS_INVALID_DIMENSION: return "invalid dimension";
    case SKS_PRECONDITION: return "precondition violated";
    case SKS_RANK_DEFICIENT: return "rank deficient";
    case SKS_DEGENERATE_INPUT: return "degenerate input";
    case SKS_NUMERICAL_FAILURE: return "numerical failure";
    case SKS_PARSE_ERROR: return "parse error";
    case SKS_UNSUPPORTED_FORMAT: return "unsupported format";
    case SKS_IO_ERROR: return "i/o error";
    case SKS_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sks_version(void) { return "0.1.0"; }

sks_status sks_matrix_dense(int64_t rows, int64_t cols, const double* colmajor, sks_matrix** out) {
  return guarded([&] {
    require(rows >= 0 && cols >= 0, ErrorCode::invalid_argument, "negative shape");
    if (rows * cols > 0) need(colmajor, "data");
    DenseMatrix D = rows * cols > 0 ? DenseMatrix(Eigen::Map<const DenseMatrix>(colmajor, rows, cols))
                                    : DenseMatrix(rows, cols);
    emit(out, Matrix(std::move(D)));
  });
}

sks_status sks_matrix_csr(int64_t rows, int64_t cols, const int64_t* row_ptr, const int64_t* col_idx,
                          const double* values, sks_matrix** out) {
  return guarded([&] {
    require(rows >= 0 && cols >= 0, ErrorCode::invalid_argument, "negative shape");
    need(row_ptr, "row_ptr");
    require(row_ptr[0] == 0, ErrorCode::invalid_argument, "row_ptr[0] must be 0");
    std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
    for (int64_t i = 0; i < rows; ++i) {
      require(row_ptr[i + 1] >= row_ptr[i], ErrorCode::invalid_argument, "row_ptr must be nondecreasing");
      for (int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
        require(col_idx[p] >= 0 && col_idx[p] < cols, ErrorCode::invalid_argument, "column index out of range");
        triplets.emplace_back(i, col_idx[p], values[p]);
      }
    }
    SparseMatrix S(rows, cols);
    S.setFromTriplets(triplets.begin(), triplets.end());
    emit(out, Matrix(std::move(S)));
  });
}

sks_status sks_matrix_read_mm(const char* path, sks_matrix** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, read_matrix_market(std::string(path)));
  });
}

sks_status sks_matrix_write_mm(const sks_matrix* A, const char* path) {
  return guarded([&] {
    need(A, "matrix");
    need(path, "path");
    write_matrix_market(std::string(path), A->value);
  });
}

sks_status sks_matrix_shape(const sks_matrix* A, int64_t* rows, int64_t* cols, int64_t* nnz, int* is_sparse) {
  return guarded([&] {
    need(A, "matrix");
    if (rows) *rows = A->value.rows();
    if (cols) *cols = A->value.cols();
    if (nnz) *nnz = A->value.nnz();
    if (is_sparse) *is_sparse = A->value.is_sparse() ? 1 : 0;
  });
}

sks_status sks_matrix_to_dense(const sks_matrix* A, double* colmajor) {
  return guarded([&] {
    need(A, "matrix");
    copy_out(A->value.to_dense(), colmajor);
  });
}

void sks_matrix_destroy(sks_matrix* A) { delete A; }

sks_status sks_gen_cauchy(int64_t n, sks_matrix** out) {
  return guarded([&] {
    CauchySpec spec;
    spec.n = n;
    emit(out, gen_cauchy(spec));
  });
}

sks_status sks_gen_sparse(int64_t m, int64_t n, double density, double kappa, uint64_t seed, sks_matrix** out) {
  return guarded([&] { emit(out, gen_sparse_conditioned(m, n, density, kappa, seed)); });
}

sks_status sks_gen_gaussian(int64_t m, int64_t n, uint64_t seed, sks_matrix** out) {
  return guarded([&] {
    require(m >= 0 && n >= 0, ErrorCode::invalid_argument, "negative shape");
    emit(out, Matrix(gen_gaussian(m, n, seed)));
  });
}

sks_status sks_parse_sketch_kind(const char* name, sks_sketch_kind* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "output");
    switch (parse_sketch_kind(name)) {
      case SketchKind::gaussian: *out = SKS_GAUSSIAN; break;
      case SketchKind::srtt: *out = SKS_SRTT; break;
      case SketchKind::sparse_sign: *out = SKS_SPARSE_SIGN; break;
    }
  });
}

sks_status sks_sketch_dim(sks_sketch_kind kind, double epsilon, double delta, int64_t k, int64_t m, double c,
                          int64_t* s_out) {
  return guarded([&] {
    need(s_out, "output");
    EmbeddingSpec spec;
    spec.kind = kind_of(kind);
    spec.epsilon = epsilon;
    spec.delta = delta;
    spec.k = k;
    spec.m = m;
    *s_out = sketch_dim(spec, c);
  });
}

sks_status sks_sketch_create(sks_sketch_kind kind, int64_t s, int64_t m, uint64_t seed, sks_sketch** out) {
  return guarded([&] { emit(out, SketchOperator(kind_of(kind), s, m, seed)); });
}

sks_status sks_sketch_apply(const sks_sketch* S, const sks_matrix* X, double* out) {
  return guarded([&] {
    need(S, "sketch");
    need(X, "matrix");
    copy_out(S->value.apply(X->value), out);
  });
}

sks_status sks_empirical_epsilon(const sks_sketch* S, const sks_matrix* X, double* epsilon) {
  return guarded([&] {
    need(S, "sketch");
    need(X, "matrix");
    need(epsilon, "output");
    *epsilon = certify_range(S->value, X->value).epsilon_emp;
  });
}

void sks_sketch_destroy(sks_sketch* S) { delete S; }

sks_status sks_stssvd(const sks_matrix* A, const sks_sketch* S, double rtol, sks_factors** out) {
  return guarded([&] {
    need(A, "matrix");
    need(S, "sketch");
    emit(out, sts_svd(A->value, S->value, rtol));
  });
}

sks_status sks_stssvd_via_qr(const sks_matrix* A, const sks_sketch* S, double rtol, sks_factors** out) {
  return guarded([&] {
    need(A, "matrix");
    need(S, "sketch");
    emit(out, sts_svd_via_qr(A->value, S->value, rtol));
  });
}

sks_status sks_factors_truncate(const sks_factors* f, int64_t k, sks_factors** out) {
  return guarded([&] {
    need(f, "factors");
    emit(out, truncate(f->value, k));
  });
}

sks_status sks_factors_dims(const sks_factors* f, int64_t* m, int64_t* n, int64_t* rank) {
  return guarded([&] {
    need(f, "factors");
    if (m) *m = f->value.W.rows();
    if (n) *n = f->value.V.rows();
    if (rank) *rank = f->value.rank;
  });
}

sks_status sks_factors_theta(const sks_factors* f, double* theta) {
  return guarded([&] {
    need(f, "factors");
    copy_out(f->value.theta, theta);
  });
}

sks_status sks_factors_W(const sks_factors* f, double* colmajor) {
  return guarded([&] {
    need(f, "factors");
    copy_out(f->value.W, colmajor);
  });
}

sks_status sks_factors_V(const sks_factors* f, double* colmajor) {
  return guarded([&] {
    need(f, "factors");
    copy_out(f->value.V, colmajor);
  });
}

const char* sks_factors_warning(const sks_factors* f) {
  if (f == nullptr || f->value.warning.empty()) return nullptr;
  return f->value.warning.c_str();
}

void sks_factors_destroy(sks_factors* f) { delete f; }

sks_status sks_nearest_sts_orthogonal(const sks_matrix* A, const sks_sketch* S, sks_polar** out) {
  return guarded([&] {
    need(A, "matrix");
    need(S, "sketch");
    emit(out, nearest_sts_orthogonal(A->value, S->value));
  });
}

sks_status sks_nearest_orthogonal(const sks_matrix* A, sks_polar** out) {
  return guarded([&] {
    need(A, "matrix");
    emit(out, nearest_orthogonal(A->value));
  });
}

sks_status sks_polar_dims(const sks_polar* p, int64_t* m, int64_t* n) {
  return guarded([&] {
    need(p, "polar");
    if (m) *m = p->value.P.rows();
    if (n) *n = p->value.P.cols();
  });
}

sks_status sks_polar_P(const sks_polar* p, double* colmajor) {
  return guarded([&] {
    need(p, "polar");
    copy_out(p->value.P, colmajor);
  });
}

sks_status sks_polar_H(const sks_polar* p, double* colmajor) {
  return guarded([&] {
    need(p, "polar");
    copy_out(p->value.H, colmajor);
  });
}

void sks_polar_destroy(sks_polar* p) { delete p; }

void sks_experiment_config_init(sks_experiment_config* cfg) {
  if (cfg == nullptr) return;
  *cfg = sks_experiment_config{};
  cfg->matrix_id = "matrix";
  cfg->kind = SKS_SRTT;
  cfg->seed = 1;
  cfg->reps = 50;
  cfg->timing = 1;
}

sks_status sks_default_s_values(sks_command cmd, int64_t m, int64_t n, int xl, int64_t* values, size_t capacity,
                                size_t* count) {
  return guarded([&] {
    const auto v = default_s_values(command_of(cmd), m, n, xl != 0);
    if (count) *count = v.size();
    for (std::size_t i = 0; i < v.size() && i < capacity; ++i) values[i] = v[i];
  });
}

sks_status sks_run_experiment(sks_command cmd, const sks_matrix* A, const sks_experiment_config* cfg, char** csv,
                              char** jsonl, sks_experiment_summary* summary) {
  return guarded([&] {
    need(A, "matrix");
    need(cfg, "config");
    ExperimentConfig c;
    if (cfg->matrix_id) c.matrix_id = cfg->matrix_id;
    c.kind = kind_of(cfg->kind);
    if (cfg->s_count > 0) need(cfg->s_values, "s_values");
    c.s_values.assign(cfg->s_values, cfg->s_values + cfg->s_count);
    c.seed = cfg->seed;
    c.reps = cfg->reps;
    if (cfg->has_epsilon) c.epsilon = cfg->epsilon;
    c.raw = cfg->raw != 0;
    c.timing = cfg->timing != 0;
    c.threads = cfg->threads;
    const ExperimentOutput result = run_experiment(command_of(cmd), A->value, c);
    if (summary) {
      summary->rows = result.summary.rows;
      summary->checks = result.summary.checks;
      summary->violations = result.summary.violations;
      summary->flagged = result.summary.flagged;
    }
    char* csv_copy = csv ? dup_string(result.csv) : nullptr;
    if (jsonl) {
      try {
        *jsonl = dup_string(result.jsonl);
      } catch (...) {
        std::free(csv_copy);
        throw;
      }
    }
    if (csv) *csv = csv_copy;
  });
}

void sks_free_string(char* s) { std::free(s); }

}  // extern "C"
