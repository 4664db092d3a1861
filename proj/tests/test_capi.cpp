#include "doctest.h"

#include "sketchsvd/sketchsvd.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

struct Owned {
  sks_matrix* m = nullptr;
  ~Owned() { sks_matrix_destroy(m); }
};

std::vector<double> column_major(int64_t rows, int64_t cols, unsigned seed) {
  std::vector<double> v(static_cast<std::size_t>(rows * cols));
  unsigned x = seed;
  for (auto& e : v) {
    x = x * 1103515245u + 12345u;
    e = static_cast<double>((x >> 8) % 2001) / 1000.0 - 1.0;
  }
  return v;
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(sks_status_name(SKS_OK)) == "ok");
  CHECK(std::string(sks_version()) == "0.1.0");
  sks_matrix* m = nullptr;
  CHECK(sks_matrix_dense(-1, 2, nullptr, &m) == SKS_INVALID_ARGUMENT);
  CHECK(std::strlen(sks_last_error()) > 0);
  CHECK(m == nullptr);
  CHECK(sks_matrix_dense(2, 2, nullptr, &m) == SKS_INVALID_ARGUMENT);
  const double bad[] = {1.0, NAN};
  CHECK(sks_matrix_dense(2, 1, bad, &m) == SKS_INVALID_ARGUMENT);
  sks_matrix_destroy(nullptr);
  sks_sketch_destroy(nullptr);
  sks_factors_destroy(nullptr);
  sks_polar_destroy(nullptr);
}

TEST_CASE("dense and csr matrices") {
  const double d[] = {1, 0, 0, 2, 3, 0};  // 3x2 column-major
  Owned a;
  REQUIRE(sks_matrix_dense(3, 2, d, &a.m) == SKS_OK);
  int64_t r = 0, c = 0, nnz = 0;
  int sparse = -1;
  CHECK(sks_matrix_shape(a.m, &r, &c, &nnz, &sparse) == SKS_OK);
  CHECK(r == 3);
  CHECK(c == 2);
  CHECK(sparse == 0);

  const int64_t row_ptr[] = {0, 2, 3, 3};
  const int64_t col_idx[] = {0, 1, 1};
  const double val[] = {1, 2, 3};
  Owned b;
  REQUIRE(sks_matrix_csr(3, 2, row_ptr, col_idx, val, &b.m) == SKS_OK);
  CHECK(sks_matrix_shape(b.m, &r, &c, &nnz, &sparse) == SKS_OK);
  CHECK(nnz == 3);
  CHECK(sparse == 1);
  std::vector<double> out(6);
  CHECK(sks_matrix_to_dense(b.m, out.data()) == SKS_OK);
  CHECK(out == std::vector<double>(d, d + 6));

  const int64_t bad_col[] = {0, 5, 1};
  Owned bad;
  CHECK(sks_matrix_csr(3, 2, row_ptr, bad_col, val, &bad.m) == SKS_INVALID_ARGUMENT);
}

TEST_CASE("matrix market through the c interface") {
  Owned a;
  REQUIRE(sks_gen_sparse(50, 4, 0.2, 10.0, 3, &a.m) == SKS_OK);
  const auto path = (std::filesystem::temp_directory_path() / "sks_capi.mtx").string();
  CHECK(sks_matrix_write_mm(a.m, path.c_str()) == SKS_OK);
  Owned b;
  CHECK(sks_matrix_read_mm(path.c_str(), &b.m) == SKS_OK);
  std::vector<double> x(200), y(200);
  sks_matrix_to_dense(a.m, x.data());
  sks_matrix_to_dense(b.m, y.data());
  CHECK(x == y);
  std::filesystem::remove(path);
  Owned missing;
  CHECK(sks_matrix_read_mm("/nonexistent.mtx", &missing.m) == SKS_IO_ERROR);
}

TEST_CASE("sketch and factorization round trip") {
  const int64_t m = 60, n = 5;
  const auto data = column_major(m, n, 1);
  Owned a;
  REQUIRE(sks_matrix_dense(m, n, data.data(), &a.m) == SKS_OK);

  sks_sketch_kind kind;
  REQUIRE(sks_parse_sketch_kind("sparse-sign", &kind) == SKS_OK);
  CHECK(kind == SKS_SPARSE_SIGN);
  CHECK(sks_parse_sketch_kind("nope", &kind) == SKS_INVALID_ARGUMENT);

  int64_t s = 0;
  CHECK(sks_sketch_dim(SKS_SRTT, 0.5, 0.01, n, m, 1.0, &s) == SKS_OK);
  CHECK(s == 20);

  sks_sketch* S = nullptr;
  CHECK(sks_sketch_create(SKS_GAUSSIAN, 0, m, 1, &S) == SKS_INVALID_DIMENSION);
  REQUIRE(sks_sketch_create(SKS_GAUSSIAN, 30, m, 7, &S) == SKS_OK);
  std::vector<double> SA(30 * n);
  CHECK(sks_sketch_apply(S, a.m, SA.data()) == SKS_OK);
  double eps = -1.0;
  CHECK(sks_empirical_epsilon(S, a.m, &eps) == SKS_OK);
  CHECK(eps >= 0.0);

  sks_factors* f = nullptr;
  REQUIRE(sks_stssvd(a.m, S, -1.0, &f) == SKS_OK);
  int64_t fm = 0, fn = 0, rank = 0;
  CHECK(sks_factors_dims(f, &fm, &fn, &rank) == SKS_OK);
  CHECK(fm == m);
  CHECK(fn == n);
  CHECK(rank == n);
  CHECK(sks_factors_warning(f) == nullptr);
  std::vector<double> theta(rank), W(m * rank), V(n * rank);
  CHECK(sks_factors_theta(f, theta.data()) == SKS_OK);
  CHECK(sks_factors_W(f, W.data()) == SKS_OK);
  CHECK(sks_factors_V(f, V.data()) == SKS_OK);
  double err = 0.0, nrm = 0.0;
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t k = 0; k < rank; ++k) acc += W[k * m + i] * theta[k] * V[k * n + j];
      err += std::pow(acc - data[j * m + i], 2);
      nrm += std::pow(data[j * m + i], 2);
    }
  }
  CHECK(std::sqrt(err / nrm) < 1e-12);

  sks_factors* t = nullptr;
  CHECK(sks_factors_truncate(f, 2, &t) == SKS_OK);
  CHECK(sks_factors_dims(t, nullptr, nullptr, &rank) == SKS_OK);
  CHECK(rank == 2);
  sks_factors* q = nullptr;
  CHECK(sks_stssvd_via_qr(a.m, S, -1.0, &q) == SKS_OK);

  sks_polar* p = nullptr;
  REQUIRE(sks_nearest_sts_orthogonal(a.m, S, &p) == SKS_OK);
  int64_t pm = 0, pn = 0;
  CHECK(sks_polar_dims(p, &pm, &pn) == SKS_OK);
  std::vector<double> P(pm * pn), H(pn * pn);
  CHECK(sks_polar_P(p, P.data()) == SKS_OK);
  CHECK(sks_polar_H(p, H.data()) == SKS_OK);
  sks_polar* c = nullptr;
  CHECK(sks_nearest_orthogonal(a.m, &c) == SKS_OK);

  sks_polar_destroy(c);
  sks_polar_destroy(p);
  sks_factors_destroy(q);
  sks_factors_destroy(t);
  sks_factors_destroy(f);
  sks_sketch_destroy(S);
}

TEST_CASE("rank deficiency maps to its status") {
  std::vector<double> data(40, 1.0);
  Owned a;
  REQUIRE(sks_matrix_dense(20, 2, data.data(), &a.m) == SKS_OK);
  sks_sketch* S = nullptr;
  REQUIRE(sks_sketch_create(SKS_SRTT, 10, 20, 3, &S) == SKS_OK);
  sks_polar* p = nullptr;
  CHECK(sks_nearest_sts_orthogonal(a.m, S, &p) == SKS_RANK_DEFICIENT);
  CHECK(p == nullptr);
  sks_sketch_destroy(S);
}

TEST_CASE("experiment driver") {
  Owned a;
  REQUIRE(sks_gen_gaussian(120, 6, 4, &a.m) == SKS_OK);
  sks_experiment_config cfg;
  sks_experiment_config_init(&cfg);
  CHECK(cfg.reps == 50);
  CHECK(cfg.timing == 1);
  size_t count = 0;
  REQUIRE(sks_default_s_values(SKS_CMD_NEAREST, 120, 6, 0, nullptr, 0, &count) == SKS_OK);
  CHECK(count == 6);
  std::vector<int64_t> s(count);
  REQUIRE(sks_default_s_values(SKS_CMD_NEAREST, 120, 6, 0, s.data(), count, &count) == SKS_OK);
  CHECK(s.front() == 12);
  CHECK(s.back() == 72);
  cfg.s_values = s.data();
  cfg.s_count = s.size();
  cfg.reps = 3;
  cfg.timing = 0;
  cfg.matrix_id = "g";
  char* csv = nullptr;
  char* jsonl = nullptr;
  sks_experiment_summary sum{};
  REQUIRE(sks_run_experiment(SKS_CMD_NEAREST, a.m, &cfg, &csv, &jsonl, &sum) == SKS_OK);
  CHECK(std::string(csv).find("s,dist_A_P_2,dist_P_T_2,time_P_s,sandwich_pass") != std::string::npos);
  CHECK(std::string(jsonl).find("\"dist_A_P_2\"") != std::string::npos);
  CHECK(sum.rows == 6);
  CHECK(sum.violations == 0);
  sks_free_string(csv);
  sks_free_string(jsonl);

  cfg.reps = 0;
  CHECK(sks_run_experiment(SKS_CMD_NEAREST, a.m, &cfg, nullptr, nullptr, nullptr) == SKS_INVALID_ARGUMENT);
}
