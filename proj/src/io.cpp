#include "sketchsvd/io.hpp"

#include "sketchsvd/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sketchsvd {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void parse_fail(long line, const std::string& what) {
  fail(ErrorCode::parse_error, "matrix market line " + std::to_string(line) + ": " + what);
}

enum class Symmetry { general, symmetric, skew_symmetric };

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) parse_fail(1, "empty input");
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_fail(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") parse_fail(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array") parse_fail(lineno, "unknown format '" + format + "'");
  if (field == "complex") fail(ErrorCode::unsupported_format, "matrix market: complex matrices are not supported");
  if (field != "real" && field != "integer" && field != "double" && field != "pattern") {
    parse_fail(lineno, "unknown field '" + field + "'");
  }
  const bool pattern = field == "pattern";
  if (pattern && format == "array") parse_fail(lineno, "pattern field requires coordinate format");
  Symmetry sym = Symmetry::general;
  if (symmetry == "symmetric") {
    sym = Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    sym = Symmetry::skew_symmetric;
  } else if (symmetry == "hermitian") {
    fail(ErrorCode::unsupported_format, "matrix market: hermitian storage is not supported");
  } else if (symmetry != "general") {
    parse_fail(lineno, "unknown symmetry '" + symmetry + "'");
  }

  auto next_data_line = [&](std::string& out) -> bool {
    while (std::getline(in, out)) {
      ++lineno;
      const auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) parse_fail(lineno, "missing size line");
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, entries = -1;
  if (format == "coordinate") {
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0) {
      parse_fail(lineno, "malformed size line");
    }
  } else {
    if (!(size_line >> rows >> cols) || rows < 0 || cols < 0) parse_fail(lineno, "malformed size line");
  }
  if (sym != Symmetry::general && rows != cols) parse_fail(lineno, "symmetric storage requires a square matrix");

  if (format == "array") {
    DenseMatrix A = DenseMatrix::Zero(rows, cols);
    for (long long j = 0; j < cols; ++j) {
      const long long start = sym == Symmetry::general ? 0 : (sym == Symmetry::symmetric ? j : j + 1);
      for (long long i = start; i < rows; ++i) {
        if (!next_data_line(line)) parse_fail(lineno, "unexpected end of file in array data");
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v)) parse_fail(lineno, "malformed value");
        A(i, j) = v;
        if (i != j && sym == Symmetry::symmetric) A(j, i) = v;
        if (i != j && sym == Symmetry::skew_symmetric) A(j, i) = -v;
      }
    }
    return Matrix(std::move(A));
  }

  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(static_cast<std::size_t>(sym == Symmetry::general ? entries : 2 * entries));
  for (long long k = 0; k < entries; ++k) {
    if (!next_data_line(line)) parse_fail(lineno, "unexpected end of file: expected " + std::to_string(entries) + " entries");
    std::istringstream ls(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(ls >> i >> j)) parse_fail(lineno, "malformed entry");
    if (!pattern && !(ls >> v)) parse_fail(lineno, "malformed entry value");
    if (i < 1 || i > rows || j < 1 || j > cols) parse_fail(lineno, "index out of range");
    --i;
    --j;
    triplets.emplace_back(i, j, v);
    if (i != j && sym == Symmetry::symmetric) triplets.emplace_back(j, i, v);
    if (i != j && sym == Symmetry::skew_symmetric) triplets.emplace_back(j, i, -v);
  }
  SparseMatrix A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());  // sums duplicates
  return Matrix(std::move(A));
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& A) {
  char buf[64];
  if (A.is_sparse()) {
    const SparseMatrix& S = A.sparse();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << S.rows() << ' ' << S.cols() << ' ' << S.nonZeros() << '\n';
    for (Index i = 0; i < S.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(S, i); it; ++it) {
        std::snprintf(buf, sizeof buf, "%.17g", it.value());
        out << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << buf << '\n';
      }
    }
  } else {
    const DenseMatrix& D = A.dense();
    out << "%%MatrixMarket matrix array real general\n";
    out << D.rows() << ' ' << D.cols() << '\n';
    for (Index j = 0; j < D.cols(); ++j) {
      for (Index i = 0; i < D.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", D(i, j));
        out << buf << '\n';
      }
    }
  }
  if (!out) fail(ErrorCode::io_error, "matrix market: write failed");
}

void write_matrix_market(const std::string& path, const Matrix& A) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  write_matrix_market(out, A);
}

}  // namespace sketchsvd
