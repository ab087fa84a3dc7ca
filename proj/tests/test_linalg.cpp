#include <doctest.h>

#include <cmath>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"

#ifdef L1PCA_HAVE_EIGEN
#include <Eigen/SVD>
#endif

using namespace l1pca;

TEST_CASE("thin_svd worked examples") {
  const ThinSvd s = thin_svd(Matrix::from_rows({{3}, {4}}));
  REQUIRE(s.sigma.size() == 1);
  CHECK(s.sigma[0] == doctest::Approx(5.0));
  const double sign = s.v(0, 0);
  CHECK(std::abs(sign) == doctest::Approx(1.0));
  CHECK(s.u(0, 0) * sign == doctest::Approx(0.6));
  CHECK(s.u(1, 0) * sign == doctest::Approx(0.8));

  const auto id = singular_values(Matrix::identity(3));
  CHECK(id == std::vector<double>{1, 1, 1});

  const auto sv = singular_values(Matrix::from_rows({{0, 2}, {1, 0}}));
  CHECK(sv[0] == doctest::Approx(2.0));
  CHECK(sv[1] == doctest::Approx(1.0));
}

TEST_CASE("thin_svd reconstructs and stays orthonormal") {
  Philox rng(5, 5);
  for (auto [r, c] : {std::pair<Index, Index>{8, 3}, {3, 8}, {20, 20}, {1, 5}}) {
    const Matrix m = gaussian_matrix(r, c, rng);
    const ThinSvd s = thin_svd(m);
    Matrix us = s.u;
    for (Index j = 0; j < us.cols(); ++j)
      for (double& e : us.col(j)) e *= s.sigma[static_cast<std::size_t>(j)];
    CHECK(distance(matmul_nt(us, s.v), m) < 1e-12 * frobenius_norm(m) * 10);
    CHECK(stiefel_residual(s.u) < 1e-13);
    CHECK(stiefel_residual(s.v) < 1e-13);
    for (std::size_t i = 1; i < s.sigma.size(); ++i) CHECK(s.sigma[i] <= s.sigma[i - 1]);
  }
}

TEST_CASE("thin_svd completes U for rank-deficient input") {
  const Matrix m = Matrix::from_rows({{1, 1}, {1, 1}, {0, 0}});
  const ThinSvd s = thin_svd(m);
  CHECK(s.sigma[0] == doctest::Approx(2.0));
  CHECK(s.sigma[1] == doctest::Approx(0.0));
  CHECK(s.rank(1e-12) == 1);
  CHECK(stiefel_residual(s.u) < 1e-14);
}

TEST_CASE("thin_svd ill-conditioned") {
  Philox rng(9, 9);
  const Matrix u = polar_factor(gaussian_matrix(30, 6, rng));
  const Matrix v = polar_factor(gaussian_matrix(6, 6, rng));
  Matrix us = u;
  for (Index j = 0; j < 6; ++j)
    for (double& e : us.col(j)) e *= std::pow(10.0, -static_cast<double>(j) * 1.2);
  const ThinSvd s = thin_svd(matmul_nt(us, v));
  CHECK(s.sigma[5] == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(stiefel_residual(s.u) < 1e-12);
}

#ifdef L1PCA_HAVE_EIGEN
TEST_CASE("singular values match Eigen") {
  Philox rng(21, 0);
  for (auto [r, c] : {std::pair<Index, Index>{12, 5}, {5, 12}, {9, 9}}) {
    const Matrix m = gaussian_matrix(r, c, rng);
    Eigen::MatrixXd e(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) e(i, j) = m(i, j);
    const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
    const auto ours = singular_values(m);
    REQUIRE(static_cast<Index>(ours.size()) == ref.size());
    for (Index i = 0; i < ref.size(); ++i) CHECK(ours[static_cast<std::size_t>(i)] == doctest::Approx(ref(i)).epsilon(1e-12));
  }
}
#endif

TEST_CASE("polar_factor worked examples") {
  const Matrix a = polar_factor(Matrix::from_rows({{3}, {4}}));
  CHECK(distance(a, Matrix::from_rows({{0.6}, {0.8}})) < 1e-15);
  CHECK(distance(polar_factor(2.0 * Matrix::identity(2)), Matrix::identity(2)) < 1e-15);
  CHECK(distance(polar_factor(Matrix::from_rows({{0, 2}, {1, 0}})), Matrix::from_rows({{0, 1}, {1, 0}})) < 1e-15);
}

TEST_CASE("polar_factor of rank-deficient input is still feasible") {
  CHECK(stiefel_residual(polar_factor(Matrix(4, 2))) < 1e-14);
  CHECK(stiefel_residual(polar_factor(Matrix::from_rows({{1, 1}, {0, 0}, {0, 0}}))) < 1e-14);
  Matrix bad(2, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(polar_factor(bad), Error);
}

TEST_CASE("polar_factor maximizes the linear functional") {
  Philox rng(2, 2);
  const Matrix m = gaussian_matrix(6, 2, rng);
  const Matrix q = polar_factor(m);
  for (int t = 0; t < 50; ++t) CHECK(inner(m, polar_factor(gaussian_matrix(6, 2, rng))) <= inner(m, q) + 1e-12);
}

TEST_CASE("spectral_norm worked examples") {
  CHECK(spectral_norm(DataMatrix(Matrix::from_rows({{3, 0}, {0, 1}})), 1e-9) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(spectral_norm(DataMatrix(Matrix(3, 3)), 1e-9) == 0.0);
  CHECK(spectral_norm(DataMatrix(Matrix::from_rows({{1, 1}, {1, 1}})), 1e-9) == doctest::Approx(2.0).epsilon(1e-8));
  Philox rng(4, 4);
  const Matrix g = gaussian_matrix(40, 70, rng);
  CHECK(spectral_norm(DataMatrix(g), 1e-8) == doctest::Approx(singular_values(g)[0]).epsilon(1e-6));
}

TEST_CASE("stiefel_residual worked examples") {
  CHECK(stiefel_residual(Matrix::identity(3, 2)) == 0.0);
  CHECK(stiefel_residual(Matrix::from_rows({{2}, {0}})) == doctest::Approx(3.0));
  CHECK(stiefel_residual(Matrix::from_rows({{1, 0}, {0, 1}, {0, 0}})) == 0.0);
}

TEST_CASE("complete_orthonormal extends a basis") {
  const Matrix b = Matrix::from_rows({{1}, {0}, {0}});
  const Matrix full = complete_orthonormal(b, 3);
  CHECK(stiefel_residual(full) < 1e-15);
  CHECK(full.block(0, 0, 3, 1) == b);
}
