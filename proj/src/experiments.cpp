#include "sketchsvd/experiments.hpp"

#include "sketchsvd/dense.hpp"
#include "sketchsvd/error.hpp"
#include "sketchsvd/nearest.hpp"
#include "sketchsvd/stssvd.hpp"

#include "json.hpp"

#include <Eigen/SVD>
#include <boost/random/normal_distribution.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace sketchsvd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the
// first captured exception.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn fn) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  if (static_cast<Index>(workers) > count) workers = static_cast<unsigned>(std::max<Index>(count, 1));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t rep_seed(const ExperimentConfig& cfg, Index s, Index rep) {
  return derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)), static_cast<std::uint64_t>(rep));
}

std::string describe(const char* command, const Matrix& A, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# " << command << " matrix=" << cfg.matrix_id << " m=" << A.rows() << " n=" << A.cols()
     << " nnz=" << A.nnz() << " sketch=" << to_string(cfg.kind) << " reps=" << cfg.reps << " seed=" << cfg.seed
     << '\n';
  return os.str();
}

void add_summary_json(std::string& jsonl, const char* command, const ExperimentSummary& s) {
  nlohmann::json j = {{"command", command},
                      {"summary", {{"rows", s.rows}, {"checks", s.checks}, {"violations", s.violations}, {"flagged", s.flagged}}}};
  jsonl += j.dump() + '\n';
}

}  // namespace

void ExperimentConfig::validate() const {
  require(reps >= 1, ErrorCode::invalid_argument, "experiment: repetitions must be at least 1");
  require(!s_values.empty(), ErrorCode::invalid_argument, "experiment: no sketch dimensions given");
  for (Index s : s_values) require(s >= 1, ErrorCode::invalid_argument, "experiment: sketch dimension must be >= 1");
  if (epsilon) {
    require(*epsilon >= 0.0, ErrorCode::invalid_argument, "experiment: epsilon must be nonnegative");
  }
}

std::vector<Index> default_s_values(Command cmd, Index m, Index n, bool xl) {
  std::vector<Index> out;
  switch (cmd) {
    case Command::spectrum:
      out = {30, 60};
      break;
    case Command::ortho:
      if (xl) {
        for (double c : {55.0, 60.0, 65.0}) {
          out.push_back(static_cast<Index>(std::ceil(c * std::log(static_cast<double>(std::max<Index>(n, 2))))));
        }
      } else {
        out = {15 * n, 20 * n, 25 * n};
      }
      break;
    case Command::nearest:
      for (Index k = 2; k <= 12; k += 2) out.push_back(k * n);
      break;
  }
  std::erase_if(out, [&](Index s) { return s < 1 || s > m; });
  return out;
}

Vector full_singular_values(const Matrix& A) {
  const DenseMatrix D = A.to_dense();
  if (D.size() == 0) return Vector(0);
  if (std::min(D.rows(), D.cols()) <= 600) return singular_values(D);
  Eigen::BDCSVD<DenseMatrix> svd(D);
  return svd.singularValues();
}

Vector randomized_singular_values(const Matrix& A, Index count, std::uint64_t seed) {
  const Index n = A.cols();
  const Index width = std::min(count + 5, std::min(A.rows(), n));
  if (width <= 0) return Vector(0);
  std::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> normal;
  DenseMatrix omega(n, width);
  for (Index j = 0; j < width; ++j) {
    for (Index i = 0; i < n; ++i) omega(i, j) = normal(eng);
  }
  DenseMatrix Q = householder_qr(A.multiply(omega)).Q;
  for (int step = 0; step < 2; ++step) {
    const DenseMatrix Z = householder_qr(A.multiply_transpose(Q)).Q;
    Q = householder_qr(A.multiply(Z)).Q;
  }
  const DenseMatrix B = A.multiply_transpose(Q).transpose();
  const Vector sv = singular_values(B);
  return sv.head(std::min(count, sv.size()));
}

ExperimentOutput run_spectrum(const Matrix& A, const ExperimentConfig& cfg) {
  cfg.validate();
  const Index m = A.rows();
  const Index n = A.cols();
  ExperimentOutput out;
  std::ostringstream csv;
  csv << describe("spectrum", A, cfg);

  auto t0 = Clock::now();
  const Vector sigma = full_singular_values(A);
  const double full_ms = cfg.timing ? 1e3 * seconds_since(t0) : 0.0;

  Index lmax = 0;
  for (Index s : cfg.s_values) lmax = std::max(lmax, std::min<Index>({40, s, n}));
  t0 = Clock::now();
  const Vector reference = randomized_singular_values(A, lmax, derive_seed(cfg.seed, 0xfeedULL));
  const double ref_ms = cfg.timing ? 1e3 * seconds_since(t0) : 0.0;

  // Certificates over Range(A) need its orthonormal basis; skipped for wide
  // problems where the Jacobi route would dominate the run.
  const bool certify = std::min(m, n) <= 600;
  const DenseMatrix basis = certify ? range_basis(A.to_dense()) : DenseMatrix();

  csv << "# time_ms full_svd=" << num(full_ms) << " reference=" << num(ref_ms) << '\n';
  csv << "# rank_sigma(1e-12)=" << numerical_rank(sigma, 1e-12) << '\n';
  if (!certify) csv << "# sandwich check skipped: min(m,n) > 600\n";

  bool first_block = true;
  for (Index s : cfg.s_values) {
    require(s <= m, ErrorCode::invalid_dimension, "spectrum: sketch dimension exceeds m");
    const Index ell = std::min<Index>({40, s, n});
    struct Rep {
      Vector theta;
      double ms = 0.0;
      Index rank = 0;
      Index checks = 0;
      Index fails = 0;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(cfg.reps));
    parallel_for(cfg.reps, cfg.threads, [&](Index r) {
      const SketchOperator op(cfg.kind, s, m, rep_seed(cfg, s, r));
      auto start = Clock::now();
      const StsSvdFactors f = sts_svd(A, op);
      Rep& rep = reps[static_cast<std::size_t>(r)];
      rep.ms = cfg.timing ? 1e3 * seconds_since(start) : 0.0;
      rep.theta = f.theta_all;
      rep.rank = numerical_rank(f.theta_all, 1e-12);
      if (certify) {
        const EmbeddingCertificate cert = empirical_epsilon(op, basis);
        const SpectrumComparison cmp = compare_spectra(f.theta_all, sigma, cert.epsilon_emp);
        rep.checks = static_cast<Index>(cmp.pass.size());
        rep.fails = cmp.failures();
      }
    });

    Index rank_lo = n, rank_hi = 0, match = 0, checks = 0, fails = 0;
    const Index rank_sigma = numerical_rank(sigma, 1e-12);
    for (const Rep& rep : reps) {
      rank_lo = std::min(rank_lo, rep.rank);
      rank_hi = std::max(rank_hi, rep.rank);
      match += rep.rank == rank_sigma;
      checks += rep.checks;
      fails += rep.fails;
    }
    out.summary.checks += checks;
    out.summary.violations += fails;

    if (!first_block) csv << "\n\n";
    first_block = false;
    csv << "# s=" << s << " ell=" << ell << " rank_theta(1e-12)=[" << rank_lo << ',' << rank_hi
        << "] rank_match=" << match << '/' << cfg.reps << " sandwich_failures=" << fails << '/' << checks << '\n';
    if (rank_hi == 0) csv << "# r=0: no nonzero S^T S-singular values\n";
    csv << (cfg.raw ? "rep," : "") << "index,sigma_full,theta,sigma_reference_method,time_ms\n";

    auto emit = [&](Index rep_id, Index i, double theta, double ms) {
      const double sig = i < sigma.size() ? sigma(i) : std::nan("");
      const double refv = i < reference.size() ? reference(i) : std::nan("");
      if (cfg.raw) csv << rep_id << ',';
      csv << (i + 1) << ',' << num(sig) << ',' << num(theta) << ',' << num(refv) << ',' << num(ms) << '\n';
      nlohmann::json j = {{"command", "spectrum"}, {"s", s}, {"index", i + 1}, {"sigma_full", sig},
                          {"theta", theta},        {"sigma_reference_method", refv}, {"time_ms", ms}};
      if (cfg.raw) j["rep"] = rep_id;
      out.jsonl += j.dump() + '\n';
      ++out.summary.rows;
    };

    if (cfg.raw) {
      for (Index r = 0; r < cfg.reps; ++r) {
        const Rep& rep = reps[static_cast<std::size_t>(r)];
        for (Index i = 0; i < ell; ++i) {
          emit(r, i, rep.rank == 0 || i >= rep.theta.size() ? std::nan("") : rep.theta(i), rep.ms);
        }
      }
    } else {
      double mean_ms = 0.0;
      for (const Rep& rep : reps) mean_ms += rep.ms / static_cast<double>(cfg.reps);
      for (Index i = 0; i < ell; ++i) {
        double mean = 0.0;
        for (const Rep& rep : reps) mean += (i < rep.theta.size() ? rep.theta(i) : 0.0) / static_cast<double>(cfg.reps);
        emit(-1, i, rank_hi == 0 ? std::nan("") : mean, mean_ms);
      }
    }
  }
  add_summary_json(out.jsonl, "spectrum", out.summary);
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_ortho(const Matrix& A, const ExperimentConfig& cfg) {
  cfg.validate();
  const Index m = A.rows();
  const Index n = A.cols();
  const double eps = cfg.epsilon.value_or(0.5);
  const double bound_two = distortion_ratio(eps);
  const double bound_fro = std::sqrt(static_cast<double>(n)) * bound_two;
  ExperimentOutput out;
  std::ostringstream csv;
  csv << describe("ortho", A, cfg);
  csv << "# eps=" << num(eps) << " bound_two=" << num(bound_two) << " bound_fro=" << num(bound_fro) << '\n';
  csv << (cfg.raw ? "rep," : "") << "s,fro_loss,two_loss,time_s\n";

  for (Index s : cfg.s_values) {
    require(s <= m, ErrorCode::invalid_dimension, "ortho: sketch dimension exceeds m");
    struct Rep {
      double fro = 0.0, two = 0.0, secs = 0.0;
      Index rank = 0;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(cfg.reps));
    parallel_for(cfg.reps, cfg.threads, [&](Index r) {
      const SketchOperator op(cfg.kind, s, m, rep_seed(cfg, s, r));
      auto start = Clock::now();
      const StsSvdFactors f = sts_svd(A, op);
      Rep& rep = reps[static_cast<std::size_t>(r)];
      rep.secs = cfg.timing ? seconds_since(start) : 0.0;
      rep.rank = f.rank;
      const DenseMatrix G = f.W.transpose() * f.W - DenseMatrix::Identity(f.rank, f.rank);
      rep.fro = G.norm();
      rep.two = f.rank > 0 ? spectral_norm(G) : 0.0;
    });

    Index violations = 0;
    Index rank_short = 0;
    Rep mean;
    for (Index r = 0; r < cfg.reps; ++r) {
      const Rep& rep = reps[static_cast<std::size_t>(r)];
      violations += (rep.two > bound_two + kBoundSlack) + (rep.fro > bound_fro + kBoundSlack);
      rank_short += rep.rank < n;
      const double w = 1.0 / static_cast<double>(cfg.reps);
      mean.fro += w * rep.fro;
      mean.two += w * rep.two;
      mean.secs += w * rep.secs;
      if (cfg.raw) {
        csv << r << ',' << s << ',' << num(rep.fro) << ',' << num(rep.two) << ',' << num(rep.secs) << '\n';
        nlohmann::json j = {{"command", "ortho"}, {"rep", r},          {"s", s},
                            {"fro_loss", rep.fro}, {"two_loss", rep.two}, {"time_s", rep.secs}};
        out.jsonl += j.dump() + '\n';
        ++out.summary.rows;
      }
    }
    if (!cfg.raw) {
      csv << s << ',' << num(mean.fro) << ',' << num(mean.two) << ',' << num(mean.secs) << '\n';
      nlohmann::json j = {{"command", "ortho"}, {"s", s}, {"fro_loss", mean.fro}, {"two_loss", mean.two},
                          {"time_s", mean.secs}, {"violations", violations}};
      out.jsonl += j.dump() + '\n';
      ++out.summary.rows;
    }
    out.summary.checks += 2 * cfg.reps;
    out.summary.violations += violations;
    csv << "# s=" << s << " violations=" << violations << '/' << 2 * cfg.reps;
    if (rank_short > 0) csv << " rank_deficient_reps=" << rank_short;
    csv << '\n';
  }
  add_summary_json(out.jsonl, "ortho", out.summary);
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_nearest(const Matrix& A, const ExperimentConfig& cfg) {
  cfg.validate();
  const Index m = A.rows();
  const DenseMatrix Ad = A.to_dense();
  ExperimentOutput out;
  std::ostringstream csv;
  csv << describe("nearest", A, cfg);

  auto t0 = Clock::now();
  const PolarPair classical = nearest_orthogonal(A);
  const double time_T = cfg.timing ? seconds_since(t0) : 0.0;
  const double dist_A_T = spectral_norm(DenseMatrix(Ad - classical.P));
  csv << "# dist_A_T_2=" << num(dist_A_T) << " time_T_s=" << num(time_T) << " eps="
      << (cfg.epsilon ? num(*cfg.epsilon) : std::string("measured")) << '\n';
  csv << (cfg.raw ? "rep," : "") << "s,dist_A_P_2,dist_P_T_2,time_P_s,sandwich_pass\n";
  {
    nlohmann::json j = {{"command", "nearest"}, {"dist_A_T_2", dist_A_T}, {"time_T_s", time_T}};
    out.jsonl += j.dump() + '\n';
  }

  for (Index s : cfg.s_values) {
    require(s <= m, ErrorCode::invalid_dimension, "nearest: sketch dimension exceeds m");
    struct Rep {
      SandwichReport report;
      double secs = 0.0;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(cfg.reps));
    parallel_for(cfg.reps, cfg.threads, [&](Index r) {
      const SketchOperator op(cfg.kind, s, m, rep_seed(cfg, s, r));
      auto start = Clock::now();
      const PolarPair sts = nearest_sts_orthogonal(A, op);
      Rep& rep = reps[static_cast<std::size_t>(r)];
      rep.secs = cfg.timing ? seconds_since(start) : 0.0;
      rep.report = nearest_sandwich_report(Ad, classical, sts, op, cfg.epsilon);
    });

    double mean_AP = 0.0, mean_PT = 0.0, mean_secs = 0.0;
    bool all_pass = true;
    Index violations = 0, flagged = 0;
    for (Index r = 0; r < cfg.reps; ++r) {
      const Rep& rep = reps[static_cast<std::size_t>(r)];
      const double w = 1.0 / static_cast<double>(cfg.reps);
      mean_AP += w * rep.report.dist_A_P;
      mean_PT += w * rep.report.dist_P_T;
      mean_secs += w * rep.secs;
      violations += !rep.report.lower.pass + !rep.report.upper.pass;
      flagged += !rep.report.narrow_pass;
      all_pass = all_pass && rep.report.pass();
      if (cfg.raw) {
        csv << r << ',' << s << ',' << num(rep.report.dist_A_P) << ',' << num(rep.report.dist_P_T) << ','
            << num(rep.secs) << ',' << (rep.report.pass() ? "true" : "false") << '\n';
        nlohmann::json j = {{"command", "nearest"},
                            {"rep", r},
                            {"s", s},
                            {"dist_A_P_2", rep.report.dist_A_P},
                            {"dist_P_T_2", rep.report.dist_P_T},
                            {"time_P_s", rep.secs},
                            {"epsilon", rep.report.epsilon},
                            {"sandwich_pass", rep.report.pass()}};
        out.jsonl += j.dump() + '\n';
        ++out.summary.rows;
      }
    }
    if (!cfg.raw) {
      csv << s << ',' << num(mean_AP) << ',' << num(mean_PT) << ',' << num(mean_secs) << ','
          << (all_pass ? "true" : "false") << '\n';
      nlohmann::json j = {{"command", "nearest"}, {"s", s},           {"dist_A_P_2", mean_AP},
                          {"dist_P_T_2", mean_PT}, {"time_P_s", mean_secs}, {"sandwich_pass", all_pass}};
      out.jsonl += j.dump() + '\n';
      ++out.summary.rows;
    }
    out.summary.checks += 2 * cfg.reps;
    out.summary.violations += violations;
    out.summary.flagged += flagged;
    csv << "# s=" << s << " violations=" << violations << '/' << 2 * cfg.reps << " narrow_range_flags=" << flagged
        << '\n';
  }
  add_summary_json(out.jsonl, "nearest", out.summary);
  out.csv = csv.str();
  return out;
}

ExperimentOutput run_experiment(Command cmd, const Matrix& A, const ExperimentConfig& cfg) {
  switch (cmd) {
    case Command::spectrum:
      return run_spectrum(A, cfg);
    case Command::ortho:
      return run_ortho(A, cfg);
    case Command::nearest:
      return run_nearest(A, cfg);
  }
  fail(ErrorCode::invalid_argument, "unknown command");
}

}  // namespace sketchsvd
