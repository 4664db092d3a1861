#include "sketchsvd/matrix.hpp"

#include "sketchsvd/error.hpp"

#include <cmath>

namespace sketchsvd {

Matrix::Matrix(DenseMatrix dense) : data_(std::move(dense)) {
  require(this->dense().allFinite(), ErrorCode::invalid_argument, "matrix has non-finite entries");
}

Matrix::Matrix(SparseMatrix sparse) : data_(std::move(sparse)) {
  auto& sp = std::get<SparseMatrix>(data_);
  sp.makeCompressed();
  const double* v = sp.valuePtr();
  for (std::int64_t k = 0; k < sp.nonZeros(); ++k) {
    require(std::isfinite(v[k]), ErrorCode::invalid_argument, "matrix has non-finite entries");
  }
}

Index Matrix::rows() const {
  return std::visit([](const auto& m) -> Index { return m.rows(); }, data_);
}

Index Matrix::cols() const {
  return std::visit([](const auto& m) -> Index { return m.cols(); }, data_);
}

std::int64_t Matrix::nnz() const {
  if (is_sparse()) return sparse().nonZeros();
  return static_cast<std::int64_t>(dense().size());
}

DenseMatrix Matrix::to_dense() const {
  if (is_sparse()) return DenseMatrix(sparse());
  return dense();
}

Vector Matrix::column(Index j) const {
  if (!is_sparse()) return dense().col(j);
  return Vector(sparse().col(j));
}

DenseMatrix Matrix::multiply(const DenseMatrix& B) const {
  require(B.rows() == cols(), ErrorCode::shape, "multiply: inner dimensions differ");
  if (is_sparse()) return sparse() * B;
  return dense() * B;
}

DenseMatrix Matrix::multiply_transpose(const DenseMatrix& B) const {
  require(B.rows() == rows(), ErrorCode::shape, "multiply_transpose: inner dimensions differ");
  if (is_sparse()) return sparse().transpose() * B;
  return dense().transpose() * B;
}

double Matrix::fro_norm() const {
  if (is_sparse()) return sparse().norm();
  return dense().norm();
}

}  // namespace sketchsvd
