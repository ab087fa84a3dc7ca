#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace l1pca {

using Index = std::ptrdiff_t;

// Dense column-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols, double fill = 0.0);
  Matrix(Index rows, Index cols, std::vector<double> values);

  // Row-major nested initializer, convenient for small literals in tests.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(Index n);
  static Matrix identity(Index rows, Index cols);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return size() == 0; }

  double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(j * rows_ + i)]; }
  double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(j * rows_ + i)]; }

  std::span<double> col(Index j) {
    return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)};
  }
  std::span<const double> col(Index j) const {
    return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;
  Matrix block(Index row0, Index col0, Index rows, Index cols) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator-(Matrix a);

// Plain products for the small dense matrices used throughout (K x K, d x K).
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double squared_norm(const Matrix& a);
double inner(const Matrix& a, const Matrix& b);
double l1_norm(const Matrix& a);
double max_abs(const Matrix& a);
double distance(const Matrix& a, const Matrix& b);

// Column-compressed sparse matrix. Row indices are strictly increasing within
// each column and every index is < rows.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
               std::vector<Index> row_idx, std::vector<double> values);

  static SparseMatrix from_dense(const Matrix& dense, double drop_tol = 0.0);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nonzeros() const noexcept { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& col_ptr() const noexcept { return col_ptr_; }
  const std::vector<Index>& row_idx() const noexcept { return row_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Matrix to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

// The d x n data matrix X, dense or sparse. Read-only once constructed; the
// two products every solver needs are X^T B and X B.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(Matrix dense);  // NOLINT(google-explicit-constructor)
  DataMatrix(SparseMatrix sparse);  // NOLINT(google-explicit-constructor)

  Index rows() const;
  Index cols() const;
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }
  bool is_zero() const;
  bool all_finite() const;

  // X^T B for B with rows() rows.
  Matrix tmul(const Matrix& b) const;
  // X B for B with cols() rows.
  Matrix mul(const Matrix& b) const;

  Matrix to_dense() const;
  const Matrix* dense() const noexcept { return std::get_if<Matrix>(&storage_); }
  const SparseMatrix* sparse() const noexcept { return std::get_if<SparseMatrix>(&storage_); }

 private:
  std::variant<Matrix, SparseMatrix> storage_;
};

}  // namespace l1pca
