#pragma once

#include "l1pca/matrix.hpp"

// Data-parallel products with the data matrix. Every kernel comes in two
// flavours: a serial reference and an OpenMP version. The OpenMP versions
// partition the *output* and keep the per-entry summation order of the
// serial loop, so both produce bit-identical results for any thread count.
namespace l1pca::kernels {

namespace serial {

// out = X^T B   (X: d x n dense, B: d x K, out: n x K)
void dense_tmul(const Matrix& x, const Matrix& b, Matrix& out);
// out = X B     (X: d x n dense, B: n x K, out: d x K)
void dense_mul(const Matrix& x, const Matrix& b, Matrix& out);
void sparse_tmul(const SparseMatrix& x, const Matrix& b, Matrix& out);
void sparse_mul(const SparseMatrix& x, const Matrix& b, Matrix& out);

}  // namespace serial

namespace omp {

void dense_tmul(const Matrix& x, const Matrix& b, Matrix& out);
void dense_mul(const Matrix& x, const Matrix& b, Matrix& out);
void sparse_tmul(const SparseMatrix& x, const Matrix& b, Matrix& out);
void sparse_mul(const SparseMatrix& x, const Matrix& b, Matrix& out);

}  // namespace omp

int max_threads();

}  // namespace l1pca::kernels
