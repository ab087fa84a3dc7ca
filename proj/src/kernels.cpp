#include "l1pca/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace l1pca::kernels {

namespace {

inline double dot(const double* a, const double* b, Index n) {
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Rows [i0, i1) of out = X B, j ascending so every entry sees the same
// summation order regardless of how rows are split.
inline void dense_mul_rows(const Matrix& x, const Matrix& b, Matrix& out, Index i0, Index i1) {
  const Index n = x.cols();
  for (Index k = 0; k < b.cols(); ++k) {
    double* o = out.data() + k * out.rows();
    for (Index i = i0; i < i1; ++i) o[i] = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double bjk = b(j, k);
      const double* xj = x.data() + j * x.rows();
      for (Index i = i0; i < i1; ++i) o[i] += xj[i] * bjk;
    }
  }
}

inline void sparse_mul_col(const SparseMatrix& x, const Matrix& b, Matrix& out, Index k) {
  const auto& cp = x.col_ptr();
  const auto& ri = x.row_idx();
  const auto& v = x.values();
  double* o = out.data() + k * out.rows();
  std::fill(o, o + out.rows(), 0.0);
  for (Index j = 0; j < x.cols(); ++j) {
    const double bjk = b(j, k);
    for (Index p = cp[j]; p < cp[j + 1]; ++p) o[ri[p]] += v[p] * bjk;
  }
}

inline double sparse_col_dot(const SparseMatrix& x, const Matrix& b, Index j, Index k) {
  const auto& cp = x.col_ptr();
  const auto& ri = x.row_idx();
  const auto& v = x.values();
  double s = 0.0;
  for (Index p = cp[j]; p < cp[j + 1]; ++p) s += v[p] * b(ri[p], k);
  return s;
}

}  // namespace

namespace serial {

void dense_tmul(const Matrix& x, const Matrix& b, Matrix& out) {
  const Index d = x.rows();
  for (Index k = 0; k < b.cols(); ++k)
    for (Index j = 0; j < x.cols(); ++j)
      out(j, k) = dot(x.data() + j * d, b.data() + k * d, d);
}

void dense_mul(const Matrix& x, const Matrix& b, Matrix& out) {
  dense_mul_rows(x, b, out, 0, x.rows());
}

void sparse_tmul(const SparseMatrix& x, const Matrix& b, Matrix& out) {
  for (Index k = 0; k < b.cols(); ++k)
    for (Index j = 0; j < x.cols(); ++j) out(j, k) = sparse_col_dot(x, b, j, k);
}

void sparse_mul(const SparseMatrix& x, const Matrix& b, Matrix& out) {
  for (Index k = 0; k < b.cols(); ++k) sparse_mul_col(x, b, out, k);
}

}  // namespace serial

namespace omp {

void dense_tmul(const Matrix& x, const Matrix& b, Matrix& out) {
  const Index d = x.rows();
  const Index n = x.cols();
  const Index total = n * b.cols();
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < total; ++t) {
    const Index k = t / n;
    const Index j = t % n;
    out(j, k) = dot(x.data() + j * d, b.data() + k * d, d);
  }
}

void dense_mul(const Matrix& x, const Matrix& b, Matrix& out) {
  constexpr Index kRowBlock = 256;
  const Index d = x.rows();
  const Index blocks = (d + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index i0 = blk * kRowBlock;
    dense_mul_rows(x, b, out, i0, std::min(d, i0 + kRowBlock));
  }
}

void sparse_tmul(const SparseMatrix& x, const Matrix& b, Matrix& out) {
  const Index n = x.cols();
  const Index total = n * b.cols();
#pragma omp parallel for schedule(dynamic, 64)
  for (Index t = 0; t < total; ++t) {
    const Index k = t / n;
    const Index j = t % n;
    out(j, k) = sparse_col_dot(x, b, j, k);
  }
}

void sparse_mul(const SparseMatrix& x, const Matrix& b, Matrix& out) {
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < b.cols(); ++k) sparse_mul_col(x, b, out, k);
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace l1pca::kernels
