#include <doctest.h>

#include <cmath>

#include "l1pca/error.hpp"
#include "l1pca/eval.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"

using namespace l1pca;

TEST_CASE("tev examples") {
  const DataMatrix x(Matrix::from_rows({{3, 0}, {0, 1}}));
  CHECK(tev(x, Matrix::from_rows({{1}, {0}})) == doctest::Approx(1.0));
  CHECK(tev(x, Matrix::from_rows({{0}, {1}})) == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(tev(DataMatrix(Matrix(2, 2)), Matrix::from_rows({{1}, {0}})), Error);

  Philox rng(2, 0);
  const Matrix g = gaussian_matrix(10, 30, rng);
  const ThinSvd s = thin_svd(g);
  CHECK(tev(DataMatrix(g), s.u.block(0, 0, 10, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  for (int t = 0; t < 50; ++t) CHECK(tev(DataMatrix(g), polar_factor(gaussian_matrix(10, 3, rng))) <= 1.0 + 1e-12);
}

TEST_CASE("assignment accuracy uses the best matching") {
  CHECK(assignment_accuracy({0, 0, 1, 1}, {5, 5, 7, 7}, 2) == 1.0);
  CHECK(assignment_accuracy({1, 1, 0, 0}, {5, 5, 7, 7}, 2) == 1.0);
  CHECK(assignment_accuracy({0, 1, 1, 1}, {5, 5, 7, 7}, 2) == 0.75);
  std::vector<Index> a;
  std::vector<long long> l;
  for (Index i = 0; i < 30; ++i) {
    a.push_back((i * 7) % 10);
    l.push_back((i * 7 + 3) % 10);
  }
  CHECK(assignment_accuracy(a, l, 10) == 1.0);  // exercises the Hungarian path
}

TEST_CASE("k-means on separable clouds") {
  Philox rng(3, 3);
  const Index n = 60;
  Matrix x(5, n);
  std::vector<long long> labels;
  for (Index j = 0; j < n; ++j) {
    const long long c = j % 3;
    labels.push_back(c);
    for (Index i = 0; i < 5; ++i) x(i, j) = 0.05 * rng.normal();
    x(static_cast<Index>(c), j) += 10.0;
  }
  const Matrix q = Matrix::identity(5, 3);
  const ClusterReport r = kmeans_accuracy(DataMatrix(x), q, labels, 3, 5, 1);
  CHECK(r.accuracy == 1.0);
  CHECK_FALSE(r.degenerate);
  const ClusterReport again = kmeans_accuracy(DataMatrix(x), q, labels, 3, 5, 1);
  CHECK(again.assignment == r.assignment);
  CHECK(again.inertia == r.inertia);
}

TEST_CASE("k-means edge cases") {
  const DataMatrix x(Matrix::from_rows({{1, 2, 3, 4}}));
  const Matrix q = Matrix::from_rows({{1}});
  CHECK(kmeans_accuracy(x, q, {4, 4, 4, 4}, 1, 3, 0).accuracy == 1.0);

  const DataMatrix same(Matrix(1, 4, 2.0));
  const ClusterReport d = kmeans_accuracy(same, q, {0, 0, 0, 1}, 2, 3, 0);
  CHECK(d.degenerate);
  CHECK(d.accuracy == 0.75);

  Philox rng(9, 9);
  const Matrix g = gaussian_matrix(3, 40, rng);
  std::vector<long long> lab;
  for (int i = 0; i < 40; ++i) lab.push_back(static_cast<long long>(rng.below(2)));
  CHECK(kmeans_accuracy(DataMatrix(g), Matrix::identity(3, 2), lab, 2, 3, 0).accuracy >= 0.5);

  CHECK_THROWS_AS(kmeans_accuracy(x, q, {0, 1, 2, 3}, 2, 3, 0), Error);
}

TEST_CASE("choose_K_by_variance examples") {
  const DataMatrix x(Matrix::from_rows({{3, 0}, {0, 1}}));
  CHECK(choose_K_by_variance(x, 0.8) == 1);
  CHECK(choose_K_by_variance(x, 0.95) == 2);
  CHECK(choose_K_by_variance(x, 1.0) == 2);
  const DataMatrix r1(Matrix::from_rows({{1, 1, 1}, {2, 2, 2}, {0, 0, 0}}));
  CHECK(choose_K_by_variance(r1, 1.0) == 1);
  CHECK_THROWS_AS(choose_K_by_variance(DataMatrix(Matrix(2, 2)), 0.8), Error);
  CHECK_THROWS_AS(choose_K_by_variance(x, 1.5), Error);
}
