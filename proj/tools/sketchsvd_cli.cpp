// sketchsvd command-line front end. Talks to the library only through the C API.

#include "sketchsvd/sketchsvd.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kInput = 2, kNumerical = 3, kViolations = 4 };

struct CliFailure {
  int code;
  std::string message;
};

int exit_for(sks_status st) {
  switch (st) {
    case SKS_OK: return kOk;
    case SKS_NUMERICAL_FAILURE:
    case SKS_INTERNAL: return kNumerical;
    default: return kInput;
  }
}

void check(sks_status st) {
  if (st != SKS_OK) throw CliFailure{exit_for(st), std::string(sks_status_name(st)) + ": " + sks_last_error()};
}

struct MatrixDeleter {
  void operator()(sks_matrix* m) const { sks_matrix_destroy(m); }
};
using MatrixPtr = std::unique_ptr<sks_matrix, MatrixDeleter>;

struct MatrixSource {
  std::string path;
  std::string generator;
  std::optional<int64_t> m;
  std::optional<int64_t> n;
  double density = 0.003;
  double kappa = 1e10;
  uint64_t seed = 7;
};

struct RunOptions {
  MatrixSource source;
  std::string sketch;
  std::vector<int64_t> s_values;
  std::optional<double> eps;
  std::optional<double> delta;
  uint64_t seed = 1;
  int64_t reps = 50;
  std::string out;
  std::string jsonl;
  bool raw = false;
  bool xl = false;
  bool strict = false;
  int64_t max_violations = 0;
  bool no_timing = false;
  unsigned threads = 0;
};

MatrixPtr generate(const std::string& name, int64_t m, int64_t n, const MatrixSource& src) {
  sks_matrix* A = nullptr;
  if (name == "cauchy") {
    check(sks_gen_cauchy(n, &A));
  } else if (name == "sparse") {
    check(sks_gen_sparse(m, n, src.density, src.kappa, src.seed, &A));
  } else if (name == "gaussian") {
    check(sks_gen_gaussian(m, n, src.seed, &A));
  } else {
    throw CliFailure{kInput, "unknown generator '" + name + "'"};
  }
  return MatrixPtr(A);
}

struct Preset {
  std::string generator;
  int64_t m;
  int64_t n;
  std::string sketch;
};

Preset preset_for(sks_command cmd, bool xl) {
  switch (cmd) {
    case SKS_CMD_SPECTRUM:
      return xl ? Preset{"cauchy", 5000, 5000, "srtt"} : Preset{"cauchy", 200, 200, "srtt"};
    case SKS_CMD_ORTHO:
      return xl ? Preset{"sparse", 300000, 300, "gaussian"} : Preset{"sparse", 20000, 100, "gaussian"};
    case SKS_CMD_NEAREST:
      return Preset{"gaussian", 300, 20, "srtt"};
  }
  return {};
}

std::string matrix_label(const MatrixSource& src, const std::string& gen, int64_t m, int64_t n) {
  if (!src.path.empty()) return src.path;
  return gen + "-" + std::to_string(m) + "x" + std::to_string(n);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliFailure{kInput, "cannot open '" + path + "' for writing"};
  f << text;
  if (!f) throw CliFailure{kInput, "failed writing '" + path + "'"};
}

int run(sks_command cmd, const RunOptions& o) {
  const Preset preset = preset_for(cmd, o.xl);
  MatrixPtr A;
  std::string gen = o.source.generator;
  if (!o.source.path.empty()) {
    sks_matrix* raw = nullptr;
    check(sks_matrix_read_mm(o.source.path.c_str(), &raw));
    A.reset(raw);
  } else {
    if (cmd == SKS_CMD_NEAREST && o.xl) {
      throw CliFailure{kInput, "nearest --xl needs --matrix PATH (e.g. abtaha2.mtx)"};
    }
    if (gen.empty()) gen = preset.generator;
    const int64_t n = o.source.n.value_or(preset.n);
    const int64_t m = o.source.m.value_or(gen == "cauchy" ? n : preset.m);
    A = generate(gen, m, n, o.source);
  }
  int64_t m = 0, n = 0;
  check(sks_matrix_shape(A.get(), &m, &n, nullptr, nullptr));

  sks_sketch_kind kind;
  check(sks_parse_sketch_kind((o.sketch.empty() ? preset.sketch : o.sketch).c_str(), &kind));

  std::vector<int64_t> s_values = o.s_values;
  if (s_values.empty() && o.delta) {
    int64_t s = 0;
    check(sks_sketch_dim(kind, o.eps.value_or(0.5), *o.delta, n, m, 1.0, &s));
    s_values.push_back(s);
  }
  if (s_values.empty()) {
    size_t count = 0;
    check(sks_default_s_values(cmd, m, n, o.xl ? 1 : 0, nullptr, 0, &count));
    s_values.resize(count);
    check(sks_default_s_values(cmd, m, n, o.xl ? 1 : 0, s_values.data(), count, &count));
    if (s_values.empty()) throw CliFailure{kInput, "no default sketch dimension fits m=" + std::to_string(m)};
  }

  const std::string label = matrix_label(o.source, gen, m, n);
  sks_experiment_config cfg;
  sks_experiment_config_init(&cfg);
  cfg.matrix_id = label.c_str();
  cfg.kind = kind;
  cfg.s_values = s_values.data();
  cfg.s_count = s_values.size();
  cfg.seed = o.seed;
  cfg.reps = o.reps;
  cfg.has_epsilon = o.eps ? 1 : 0;
  cfg.epsilon = o.eps.value_or(0.0);
  cfg.raw = o.raw ? 1 : 0;
  cfg.timing = o.no_timing ? 0 : 1;
  cfg.threads = o.threads;

  char* csv = nullptr;
  char* jsonl = nullptr;
  sks_experiment_summary summary{};
  check(sks_run_experiment(cmd, A.get(), &cfg, &csv, &jsonl, &summary));
  std::unique_ptr<char, void (*)(char*)> csv_guard(csv, sks_free_string);
  std::unique_ptr<char, void (*)(char*)> jsonl_guard(jsonl, sks_free_string);
  write_text(o.out, csv);
  if (!o.jsonl.empty()) write_text(o.jsonl, jsonl);

  std::cerr << "rows=" << summary.rows << " checks=" << summary.checks << " violations=" << summary.violations
            << " flagged=" << summary.flagged << '\n';
  if (o.strict && summary.violations > o.max_violations) {
    std::cerr << "bound violations " << summary.violations << " exceed threshold " << o.max_violations << '\n';
    return kViolations;
  }
  return kOk;
}

void add_source_flags(CLI::App* app, MatrixSource& src) {
  app->add_option("--matrix", src.path, "Matrix Market input file");
  app->add_option("--gen", src.generator, "generator instead of the preset matrix")
      ->check(CLI::IsMember({"cauchy", "sparse", "gaussian"}));
  app->add_option("--m", src.m, "rows for generated matrices")->check(CLI::PositiveNumber);
  app->add_option("--n", src.n, "columns for generated matrices")->check(CLI::PositiveNumber);
  app->add_option("--density", src.density, "nonzero density for the sparse generator");
  app->add_option("--kappa", src.kappa, "condition number target for the sparse generator");
  app->add_option("--matrix-seed", src.seed, "generator seed");
}

CLI::App* add_run_command(CLI::App& root, const char* name, const char* help, RunOptions& o) {
  CLI::App* app = root.add_subcommand(name, help);
  add_source_flags(app, o.source);
  app->add_option("--sketch", o.sketch, "gaussian | srtt | sparse-sign")
      ->check(CLI::IsMember({"gaussian", "srtt", "sparse-sign"}));
  app->add_option("--s", o.s_values, "sketch dimensions (comma separated)")->delimiter(',');
  app->add_option("--eps", o.eps, "distortion for the bound checks (default: measured)");
  app->add_option("--delta", o.delta, "failure probability; with no --s picks s from (eps, delta)");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--reps", o.reps, "repetitions per sketch dimension")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "CSV output path (default stdout)");
  app->add_option("--jsonl", o.jsonl, "JSON-lines output path");
  app->add_flag("--raw", o.raw, "one row per repetition");
  app->add_flag("--xl", o.xl, "full-scale preset");
  app->add_flag("--strict", o.strict, "exit 4 when bound violations exceed --max-violations");
  app->add_option("--max-violations", o.max_violations, "violation threshold for --strict");
  app->add_flag("--no-timing", o.no_timing, "write 0 in time columns");
  app->add_option("--threads", o.threads, "worker threads (0: all cores)");
  return app;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Sketched S^T S-SVD, truncation and nearest S^T S-orthogonal matrices"};
  root.require_subcommand(1);
  root.set_version_flag("--version", std::string(sks_version()));

  RunOptions spectrum_opts, ortho_opts, nearest_opts;
  CLI::App* spectrum = add_run_command(root, "spectrum", "singular values vs S^T S-singular values", spectrum_opts);
  CLI::App* ortho = add_run_command(root, "ortho", "loss of orthogonality of W", ortho_opts);
  CLI::App* nearest = add_run_command(root, "nearest", "nearest S^T S-orthogonal vs orthogonal matrix", nearest_opts);

  CLI::App* gen = root.add_subcommand("gen", "write a generated matrix in Matrix Market format");
  std::string gen_name;
  std::string gen_out;
  MatrixSource gen_src;
  gen_src.m = 0;
  gen->add_option("generator", gen_name, "cauchy | sparse | gaussian")
      ->required()
      ->check(CLI::IsMember({"cauchy", "sparse", "gaussian"}));
  gen->add_option("--m", gen_src.m, "rows")->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_src.n, "columns")->check(CLI::PositiveNumber);
  gen->add_option("--density", gen_src.density, "nonzero density (sparse)");
  gen->add_option("--kappa", gen_src.kappa, "condition number target (sparse)");
  gen->add_option("--seed", gen_src.seed, "generator seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = root.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*spectrum) return run(SKS_CMD_SPECTRUM, spectrum_opts);
    if (*ortho) return run(SKS_CMD_ORTHO, ortho_opts);
    if (*nearest) return run(SKS_CMD_NEAREST, nearest_opts);
    if (*gen) {
      const int64_t n = gen_src.n.value_or(gen_name == "cauchy" ? 200 : 100);
      int64_t m = gen_src.m.value_or(0);
      if (m == 0) m = gen_name == "cauchy" ? n : 20 * n;
      MatrixPtr A = generate(gen_name, m, n, gen_src);
      const std::string path = gen_out.empty() ? "/dev/stdout" : gen_out;
      check(sks_matrix_write_mm(A.get(), path.c_str()));
      return kOk;
    }
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return kInput;
}
