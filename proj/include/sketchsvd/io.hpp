#pragma once

#include "sketchsvd/matrix.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace sketchsvd {

/// Reads a real/integer/pattern Matrix Market file. Coordinate files become
/// CSR (duplicates summed, symmetric and skew-symmetric storage expanded),
/// array files become dense. Errors carry the offending line number.
Matrix read_matrix_market(const std::string& path);
Matrix read_matrix_market(std::istream& in);

/// Sparse matrices are written in coordinate format, dense in array format.
void write_matrix_market(const std::string& path, const Matrix& A);
void write_matrix_market(std::ostream& out, const Matrix& A);

}  // namespace sketchsvd
