#pragma once

// Repetition-averaged experiment drivers behind the CLI commands `spectrum`,
// `ortho` and `nearest`. Each produces CSV (gnuplot-ready: '#' comment lines,
// blank-line separated blocks) plus a JSON-lines mirror.
//
// Repetition r of sketch dimension s uses the operator seed
// derive_seed(derive_seed(seed, s), r), so every output is a pure function of
// (matrix, config); with timing disabled the CSV is byte-reproducible.

#include "sketchsvd/matrix.hpp"
#include "sketchsvd/sketch.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sketchsvd {

enum class Command { spectrum, ortho, nearest };

struct ExperimentConfig {
  std::string matrix_id = "matrix";
  SketchKind kind = SketchKind::srtt;
  std::vector<Index> s_values;
  std::uint64_t seed = 1;
  Index reps = 50;
  /// Asserted distortion for the bound checks; empty means measured.
  /// `ortho` defaults to 0.5 when empty.
  std::optional<double> epsilon;
  bool raw = false;     // per-repetition rows instead of averages
  bool timing = true;   // false writes 0 in every time column
  unsigned threads = 0; // 0: hardware concurrency

  void validate() const;
};

struct ExperimentSummary {
  Index rows = 0;         // data rows written
  Index checks = 0;       // bound checks evaluated
  Index violations = 0;   // failed checks
  Index flagged = 0;      // advisory (narrow-range) violations
};

struct ExperimentOutput {
  std::string csv;
  std::string jsonl;
  ExperimentSummary summary;
};

/// Defaults per command and matrix width: spectrum {30, 60}; ortho
/// {15n, 20n, 25n} (xl: ceil(c ln n), c = 55, 60, 65); nearest {2n, ..., 12n}.
/// Values above m are dropped.
std::vector<Index> default_s_values(Command cmd, Index m, Index n, bool xl);

ExperimentOutput run_spectrum(const Matrix& A, const ExperimentConfig& cfg);
ExperimentOutput run_ortho(const Matrix& A, const ExperimentConfig& cfg);
ExperimentOutput run_nearest(const Matrix& A, const ExperimentConfig& cfg);
ExperimentOutput run_experiment(Command cmd, const Matrix& A, const ExperimentConfig& cfg);

/// Singular values of A: Jacobi route for min(m, n) <= 600, bidiagonal
/// divide-and-conquer above.
Vector full_singular_values(const Matrix& A);

/// Leading `count` singular values by randomized subspace iteration (two
/// power steps, oversampling 5); a cross-check column for `spectrum`.
Vector randomized_singular_values(const Matrix& A, Index count, std::uint64_t seed);

}  // namespace sketchsvd
