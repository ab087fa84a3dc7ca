#include <doctest.h>

#include "l1pca/error.hpp"
#include "l1pca/matrix.hpp"
#include "l1pca/random.hpp"

using namespace l1pca;

TEST_CASE("from_rows stores column-major") {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 0) == 4);
  CHECK(m(0, 2) == 3);
  CHECK(m.values()[1] == 4);
  CHECK(m.transpose() == Matrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));
}

TEST_CASE("products and norms") {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{0, 1}, {1, 0}});
  CHECK(matmul(a, b) == Matrix::from_rows({{2, 1}, {4, 3}}));
  CHECK(matmul_tn(a, b) == matmul(a.transpose(), b));
  CHECK(matmul_nt(a, b) == matmul(a, b.transpose()));
  CHECK(squared_norm(a) == 30.0);
  CHECK(l1_norm(-a) == 10.0);
  CHECK(max_abs(a) == 4.0);
  CHECK(inner(a, b) == 5.0);
  CHECK(distance(a, a) == 0.0);
  CHECK(frobenius_norm(Matrix::from_rows({{3}, {4}})) == doctest::Approx(5.0));
  CHECK(a.block(1, 0, 1, 2) == Matrix::from_rows({{3, 4}}));
}

TEST_CASE("sparse validation") {
  CHECK_THROWS_AS(SparseMatrix(2, 1, {0, 2}, {1, 0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(SparseMatrix(2, 1, {0, 1}, {2}, {1.0}), Error);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), Error);
  const SparseMatrix s(3, 2, {0, 2, 2}, {0, 2}, {0.5, -2.0});
  CHECK(s.to_dense() == Matrix::from_rows({{0.5, 0}, {0, 0}, {-2, 0}}));
  CHECK(SparseMatrix::from_dense(s.to_dense()) == s);
}

TEST_CASE("dense and sparse data matrices agree") {
  Philox rng(3, 4);
  Matrix dense(7, 9);
  for (Index j = 0; j < 9; ++j)
    for (Index i = 0; i < 7; ++i)
      if (rng.uniform() < 0.4) dense(i, j) = rng.normal();
  const DataMatrix xd(dense);
  const DataMatrix xs(SparseMatrix::from_dense(dense));
  CHECK(xs.is_sparse());
  CHECK_FALSE(xd.is_sparse());
  const Matrix q = gaussian_matrix(7, 3, rng);
  const Matrix p = gaussian_matrix(9, 3, rng);
  CHECK(distance(xd.tmul(q), matmul_tn(dense, q)) < 1e-12);
  CHECK(distance(xd.mul(p), matmul(dense, p)) < 1e-12);
  CHECK(xs.tmul(q) == xd.tmul(q));
  CHECK(xs.mul(p) == xd.mul(p));
  CHECK(DataMatrix(Matrix(2, 3)).is_zero());
  CHECK_FALSE(xd.is_zero());
}
