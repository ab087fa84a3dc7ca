#include "l1pca/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l1pca/error.hpp"
#include "l1pca/kernels.hpp"

namespace l1pca {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()));
  }
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kDiverged: return "diverged";
    case ErrorKind::kDegenerateUpdate: return "degenerate-update";
    case ErrorKind::kRefused: return "refused";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

Matrix::Matrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {
  if (rows < 0 || cols < 0) {
    throw Error(ErrorKind::kInvalidInput, "negative matrix dimension");
  }
}

Matrix::Matrix(Index rows, Index cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows < 0 || cols < 0 || static_cast<Index>(data_.size()) != rows * cols) {
    throw Error(ErrorKind::kDimensionMismatch, "value count does not match shape");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != c) {
      throw Error(ErrorKind::kDimensionMismatch, "ragged row literal");
    }
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::identity(Index n) { return identity(n, n); }

Matrix Matrix::identity(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < std::min(rows, cols); ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(Index row0, Index col0, Index rows, Index cols) const {
  if (row0 < 0 || col0 < 0 || row0 + rows > rows_ || col0 + cols > cols_) {
    throw Error(ErrorKind::kDimensionMismatch, "block out of range");
  }
  Matrix b(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) b(i, j) = (*this)(row0 + i, col0 + j);
  return b;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator-(Matrix a) { return a *= -1.0; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::kDimensionMismatch, "matmul: inner dimension");
  Matrix c(a.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      for (Index i = 0; i < a.rows(); ++i) c(i, j) += a(i, l) * blj;
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::kDimensionMismatch, "matmul_tn: inner dimension");
  Matrix c(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) {
      double s = 0.0;
      for (Index l = 0; l < a.rows(); ++l) s += a(l, i) * b(l, j);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::kDimensionMismatch, "matmul_nt: inner dimension");
  Matrix c(a.rows(), b.rows());
  for (Index l = 0; l < a.cols(); ++l) {
    for (Index j = 0; j < b.rows(); ++j) {
      const double bjl = b(j, l);
      if (bjl == 0.0) continue;
      for (Index i = 0; i < a.rows(); ++i) c(i, j) += a(i, l) * bjl;
    }
  }
  return c;
}

double squared_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double frobenius_norm(const Matrix& a) { return std::sqrt(squared_norm(a)); }

double inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner");
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
  return s;
}

double l1_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += std::abs(v);
  return s;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "distance");
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double t = av[k] - bv[k];
    s += t * t;
  }
  return std::sqrt(s);
}

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
                           std::vector<Index> row_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  if (rows < 0 || cols < 0 || static_cast<Index>(col_ptr_.size()) != cols + 1 ||
      col_ptr_.front() != 0 || row_idx_.size() != values_.size() ||
      col_ptr_.back() != static_cast<Index>(values_.size())) {
    throw Error(ErrorKind::kInvalidInput, "malformed column-compressed arrays");
  }
  for (Index j = 0; j < cols; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) {
      throw Error(ErrorKind::kInvalidInput, "column pointers not monotone");
    }
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] < 0 || row_idx_[p] >= rows) {
        throw Error(ErrorKind::kInvalidInput, "row index out of range in column " + std::to_string(j));
      }
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1]) {
        throw Error(ErrorKind::kInvalidInput,
                    "row indices not strictly increasing in column " + std::to_string(j));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense, double drop_tol) {
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      const double v = dense(i, j);
      if (std::abs(v) > drop_tol) {
        row_idx.push_back(i);
        values.push_back(v);
      }
    }
    col_ptr.push_back(static_cast<Index>(values.size()));
  }
  return {dense.rows(), dense.cols(), std::move(col_ptr), std::move(row_idx), std::move(values)};
}

Matrix SparseMatrix::to_dense() const {
  Matrix m(rows_, cols_);
  for (Index j = 0; j < cols_; ++j)
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) m(row_idx_[p], j) = values_[p];
  return m;
}

DataMatrix::DataMatrix(Matrix dense) : storage_(std::move(dense)) {}
DataMatrix::DataMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {}

Index DataMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

Index DataMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

bool DataMatrix::is_zero() const {
  if (const auto* d = dense()) return max_abs(*d) == 0.0;
  const auto& v = sparse()->values();
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool DataMatrix::all_finite() const {
  if (const auto* d = dense()) return d->all_finite();
  const auto& v = sparse()->values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Matrix DataMatrix::tmul(const Matrix& b) const {
  if (b.rows() != rows()) throw Error(ErrorKind::kDimensionMismatch, "X^T B: B must have d rows");
  Matrix out(cols(), b.cols());
  if (const auto* d = dense()) {
    kernels::omp::dense_tmul(*d, b, out);
  } else {
    kernels::omp::sparse_tmul(*sparse(), b, out);
  }
  return out;
}

Matrix DataMatrix::mul(const Matrix& b) const {
  if (b.rows() != cols()) throw Error(ErrorKind::kDimensionMismatch, "X B: B must have n rows");
  Matrix out(rows(), b.cols());
  if (const auto* d = dense()) {
    kernels::omp::dense_mul(*d, b, out);
  } else {
    kernels::omp::sparse_mul(*sparse(), b, out);
  }
  return out;
}

Matrix DataMatrix::to_dense() const {
  if (const auto* d = dense()) return *d;
  return sparse()->to_dense();
}

}  // namespace l1pca
