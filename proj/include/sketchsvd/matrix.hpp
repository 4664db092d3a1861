#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <variant>

namespace sketchsvd {

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;  // column-major
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;  // CSR

/// A real matrix held either densely (column-major) or in compressed sparse
/// row form. Entries are checked finite on construction.
class Matrix {
 public:
  Matrix() : data_(DenseMatrix()) {}
  Matrix(DenseMatrix dense);    // NOLINT(google-explicit-constructor)
  Matrix(SparseMatrix sparse);  // NOLINT(google-explicit-constructor)

  Index rows() const;
  Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }
  std::int64_t nnz() const;

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(data_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(data_); }

  DenseMatrix to_dense() const;
  Vector column(Index j) const;

  /// this * B, never densifying a sparse left operand.
  DenseMatrix multiply(const DenseMatrix& B) const;
  /// this^T * B.
  DenseMatrix multiply_transpose(const DenseMatrix& B) const;

  double fro_norm() const;

 private:
  std::variant<DenseMatrix, SparseMatrix> data_;
};

}  // namespace sketchsvd
