#include <doctest.h>

#include <cmath>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/model.hpp"
#include "l1pca/random.hpp"

using namespace l1pca;

namespace {
const DataMatrix kI2(Matrix::identity(2));
}

TEST_CASE("objective_l1 examples") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(objective_l1(kI2, Matrix::from_rows({{r}, {r}})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(objective_l1(DataMatrix(Matrix(2, 2)), Matrix::from_rows({{r}, {r}})) == 0.0);
  CHECK(objective_l1(kI2, Matrix::from_rows({{1}, {0}})) == 1.0);
  CHECK_THROWS_AS(objective_l1(kI2, Matrix::from_rows({{1}, {0}, {0}})), Error);
}

TEST_CASE("objective_h examples") {
  Philox rng(8, 1);
  const DataMatrix x(gaussian_matrix(4, 6, rng));
  const Matrix q = polar_factor(gaussian_matrix(4, 2, rng));
  const Matrix p = sign_select(x.tmul(q), Matrix(6, 2, 1.0));
  CHECK(objective_h(x, p, q) == doctest::Approx(-objective_l1(x, q)));
  CHECK(objective_h(DataMatrix(Matrix(2, 2)), Matrix(2, 1, 1.0), Matrix::from_rows({{1}, {0}})) == 0.0);
  CHECK(objective_h(kI2, Matrix::from_rows({{1}, {-1}}), Matrix::from_rows({{0.6}, {0.8}})) == doctest::Approx(0.2));
}

TEST_CASE("potential_psi examples") {
  const Matrix p = Matrix::from_rows({{1}, {1}});
  const Matrix q = Matrix::from_rows({{1}, {0}});
  const Matrix qp = Matrix::from_rows({{0}, {1}});
  const double h = objective_h(kI2, p, q);
  CHECK(potential_psi(kI2, p, q, q, 5.0) == h);
  CHECK(potential_psi(kI2, p, q, qp, 0.0) == h);
  // ||q - qp|| = sqrt 2 here, so use a pair at distance one
  const double c = std::cos(M_PI / 3), s = std::sin(M_PI / 3);
  const Matrix q60 = Matrix::from_rows({{c}, {s}});
  CHECK(distance(q, q60) == doctest::Approx(1.0));
  CHECK(potential_psi(kI2, p, q, q60, 2.0) == doctest::Approx(h + 1.0));
}

TEST_CASE("residual_R examples") {
  CHECK(frobenius_norm(residual_R(Matrix::from_rows({{2}, {0}}), Matrix::from_rows({{1}, {0}}))) == 0.0);
  CHECK(residual_R(Matrix::from_rows({{1}, {0}}), Matrix::from_rows({{0}, {1}})) == Matrix::from_rows({{1}, {0}}));
  CHECK(frobenius_norm(residual_R(Matrix(3, 2), Matrix::identity(3, 2))) == 0.0);
}

TEST_CASE("subgrad_dist_linear examples") {
  CHECK(subgrad_dist_linear(Matrix::from_rows({{1}, {0}}), Matrix::from_rows({{0}, {1}})) == doctest::Approx(1.0));
  CHECK(subgrad_dist_linear(Matrix::from_rows({{2}, {0}}), Matrix::from_rows({{1}, {0}})) == 0.0);
  CHECK(subgrad_dist_linear(Matrix::from_rows({{2}, {0}}),
                            Matrix::from_rows({{std::cos(M_PI / 2)}, {std::sin(M_PI / 2)}})) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(subgrad_dist_linear(Matrix::from_rows({{1}, {0}}), Matrix::from_rows({{1.1}, {0}})), Error);
}

TEST_CASE("subgrad_dist_h examples") {
  CHECK(subgrad_dist_h(DataMatrix(Matrix(2, 2)), Matrix(2, 1, 1.0), Matrix::from_rows({{1}, {0}})) == 0.0);
  CHECK(subgrad_dist_h(kI2, Matrix::from_rows({{1}, {1}}), Matrix::from_rows({{1}, {0}})) == doctest::Approx(1.0));
}

TEST_CASE("sign_select examples") {
  const Matrix prev = Matrix::from_rows({{-1, -1}, {1, 1}});
  CHECK(sign_select(Matrix(2, 2), prev) == prev);
  CHECK(sign_select(Matrix(2, 2, -0.3), prev) == Matrix(2, 2, -1.0));
  CHECK(sign_select(Matrix::from_rows({{0.5, 0}, {-2, 0}}), prev) == Matrix::from_rows({{1, -1}, {-1, 1}}));
  Matrix bad(2, 2);
  bad(1, 1) = INFINITY;
  CHECK_THROWS_AS(sign_select(bad, prev), Error);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS((ProblemInstance{DataMatrix(Matrix(2, 3)), 3, std::nullopt}.validate()), Error);
  CHECK_THROWS_AS((ProblemInstance{DataMatrix(Matrix(2, 3)), 0, std::nullopt}.validate()), Error);
  CHECK_THROWS_AS((ProblemInstance{DataMatrix(Matrix(2, 3)), 1, std::vector<long long>{1, 2}}.validate()), Error);
  CHECK_NOTHROW((ProblemInstance{DataMatrix(Matrix(2, 3)), 2, std::nullopt}.validate()));
}

TEST_CASE("sandwich property on random instances") {
  Philox rng(31, 7);
  for (int t = 0; t < 200; ++t) {
    const Matrix a = gaussian_matrix(5, 2, rng);
    const Matrix q = polar_factor(gaussian_matrix(5, 2, rng));
    const double r = frobenius_norm(residual_R(a, q));
    const double dist = subgrad_dist_linear(a, q);
    CHECK(dist <= r * (1 + 1e-12));
    CHECK(dist >= 0.5 * r * (1 - 1e-12));
  }
}
