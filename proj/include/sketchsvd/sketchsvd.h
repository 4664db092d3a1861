#ifndef SKETCHSVD_H
#define SKETCHSVD_H

/* C interface to the sketchsvd library. Objects are opaque handles owned by
 * the caller and released with the matching *_destroy function. Every
 * function returning sks_status records a message retrievable with
 * sks_last_error() on the calling thread. Dense arrays are column-major. */

#include <stddef.h>
#include <stdint.h>

#if defined(SKS_BUILDING_LIBRARY)
#define SKS_API __attribute__((visibility("default")))
#else
#define SKS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sks_status {
  SKS_OK = 0,
  SKS_INVALID_ARGUMENT = 1,
  SKS_SHAPE = 2,
  SKS_INVALID_DIMENSION = 3,
  SKS_PRECONDITION = 4,
  SKS_RANK_DEFICIENT = 5,
  SKS_DEGENERATE_INPUT = 6,
  SKS_NUMERICAL_FAILURE = 7,
  SKS_PARSE_ERROR = 8,
  SKS_UNSUPPORTED_FORMAT = 9,
  SKS_IO_ERROR = 10,
  SKS_INTERNAL = 99
} sks_status;

typedef enum sks_sketch_kind { SKS_GAUSSIAN = 0, SKS_SRTT = 1, SKS_SPARSE_SIGN = 2 } sks_sketch_kind;

typedef enum sks_command { SKS_CMD_SPECTRUM = 0, SKS_CMD_ORTHO = 1, SKS_CMD_NEAREST = 2 } sks_command;

typedef struct sks_matrix sks_matrix;
typedef struct sks_sketch sks_sketch;
typedef struct sks_factors sks_factors;
typedef struct sks_polar sks_polar;

SKS_API const char* sks_last_error(void);
SKS_API const char* sks_status_name(sks_status status);
SKS_API const char* sks_version(void);

/* Matrices */
SKS_API sks_status sks_matrix_dense(int64_t rows, int64_t cols, const double* colmajor, sks_matrix** out);
/* CSR with row_ptr of length rows+1 and col_idx/values of length row_ptr[rows]. */
SKS_API sks_status sks_matrix_csr(int64_t rows, int64_t cols, const int64_t* row_ptr, const int64_t* col_idx,
                                  const double* values, sks_matrix** out);
SKS_API sks_status sks_matrix_read_mm(const char* path, sks_matrix** out);
SKS_API sks_status sks_matrix_write_mm(const sks_matrix* A, const char* path);
SKS_API sks_status sks_matrix_shape(const sks_matrix* A, int64_t* rows, int64_t* cols, int64_t* nnz,
                                    int* is_sparse);
/* Writes rows*cols doubles. */
SKS_API sks_status sks_matrix_to_dense(const sks_matrix* A, double* colmajor);
SKS_API void sks_matrix_destroy(sks_matrix* A);

SKS_API sks_status sks_gen_cauchy(int64_t n, sks_matrix** out);
SKS_API sks_status sks_gen_sparse(int64_t m, int64_t n, double density, double kappa, uint64_t seed,
                                  sks_matrix** out);
SKS_API sks_status sks_gen_gaussian(int64_t m, int64_t n, uint64_t seed, sks_matrix** out);

/* Sketching */
SKS_API sks_status sks_parse_sketch_kind(const char* name, sks_sketch_kind* out);
SKS_API sks_status sks_sketch_dim(sks_sketch_kind kind, double epsilon, double delta, int64_t k, int64_t m,
                                  double c, int64_t* s_out);
SKS_API sks_status sks_sketch_create(sks_sketch_kind kind, int64_t s, int64_t m, uint64_t seed, sks_sketch** out);
/* out holds s*cols(X) doubles. */
SKS_API sks_status sks_sketch_apply(const sks_sketch* S, const sks_matrix* X, double* out);
/* Distortion of S over the column space of X. */
SKS_API sks_status sks_empirical_epsilon(const sks_sketch* S, const sks_matrix* X, double* epsilon);
SKS_API void sks_sketch_destroy(sks_sketch* S);

/* S^T S-SVD: A = W diag(theta) V^T */
SKS_API sks_status sks_stssvd(const sks_matrix* A, const sks_sketch* S, double rtol, sks_factors** out);
SKS_API sks_status sks_stssvd_via_qr(const sks_matrix* A, const sks_sketch* S, double rtol, sks_factors** out);
SKS_API sks_status sks_factors_truncate(const sks_factors* f, int64_t k, sks_factors** out);
SKS_API sks_status sks_factors_dims(const sks_factors* f, int64_t* m, int64_t* n, int64_t* rank);
SKS_API sks_status sks_factors_theta(const sks_factors* f, double* theta);
SKS_API sks_status sks_factors_W(const sks_factors* f, double* colmajor);
SKS_API sks_status sks_factors_V(const sks_factors* f, double* colmajor);
/* Non-null when the retained rank equals s; owned by f. */
SKS_API const char* sks_factors_warning(const sks_factors* f);
SKS_API void sks_factors_destroy(sks_factors* f);

/* Polar factors A = P H (P is m x n, H is n x n) */
SKS_API sks_status sks_nearest_sts_orthogonal(const sks_matrix* A, const sks_sketch* S, sks_polar** out);
SKS_API sks_status sks_nearest_orthogonal(const sks_matrix* A, sks_polar** out);
SKS_API sks_status sks_polar_dims(const sks_polar* p, int64_t* m, int64_t* n);
SKS_API sks_status sks_polar_P(const sks_polar* p, double* colmajor);
SKS_API sks_status sks_polar_H(const sks_polar* p, double* colmajor);
SKS_API void sks_polar_destroy(sks_polar* p);

/* Experiments */
typedef struct sks_experiment_config {
  const char* matrix_id;
  sks_sketch_kind kind;
  const int64_t* s_values;
  size_t s_count;
  uint64_t seed;
  int64_t reps;
  int has_epsilon;
  double epsilon;
  int raw;
  int timing;
  unsigned threads;
} sks_experiment_config;

typedef struct sks_experiment_summary {
  int64_t rows;
  int64_t checks;
  int64_t violations;
  int64_t flagged;
} sks_experiment_summary;

SKS_API void sks_experiment_config_init(sks_experiment_config* cfg);
/* Default sketch dimensions; writes up to capacity values, *count gets the total. */
SKS_API sks_status sks_default_s_values(sks_command cmd, int64_t m, int64_t n, int xl, int64_t* values,
                                        size_t capacity, size_t* count);
/* csv/jsonl receive malloc'd strings to be released with sks_free_string. */
SKS_API sks_status sks_run_experiment(sks_command cmd, const sks_matrix* A, const sks_experiment_config* cfg,
                                      char** csv, char** jsonl, sks_experiment_summary* summary);
SKS_API void sks_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif
