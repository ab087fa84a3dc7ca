#include <doctest.h>

#include <cmath>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"
#include "l1pca/solvers.hpp"
#include "l1pca/verify.hpp"

using namespace l1pca;

namespace {
const DataMatrix kI2(Matrix::identity(2));
const double kR = 1.0 / std::sqrt(2.0);
}  // namespace

TEST_CASE("alpha condition examples") {
  const DataMatrix x(Matrix::from_rows({{0.5, -0.2, 0.0}}));
  const Matrix q = Matrix::from_rows({{1}});
  const AlphaCheck a = check_alpha_condition(x, q, 0.1);
  CHECK(a.holds);
  CHECK(a.threshold == doctest::Approx(0.2));
  const AlphaCheck b = check_alpha_condition(x, q, 0.3);
  CHECK_FALSE(b.holds);
  CHECK(b.threshold == doctest::Approx(0.2));
  const AlphaCheck z = check_alpha_condition(DataMatrix(Matrix(1, 3)), q, 0.1);
  CHECK_FALSE(z.holds);
  CHECK(z.threshold == 0.0);
  CHECK(z.vacuous);
}

TEST_CASE("criticality report") {
  const Matrix qs = Matrix::from_rows({{kR}, {kR}});
  const Matrix ps = Matrix::from_rows({{1}, {1}});
  const CriticalityReport opt = criticality_report(kI2, ps, qs, 1e-3);
  CHECK(opt.h_residual < 1e-12);
  CHECK(opt.certified_critical_for_l1);
  CHECK(opt.l1_residual <= 1e-10);
  CHECK(fixed_point_inclusion(kI2, ps, qs, 1e-3));

  const CriticalityReport zero = criticality_report(DataMatrix(Matrix(2, 2)), ps, qs, 1e-3);
  CHECK(zero.h_residual == 0.0);
  CHECK(zero.gen_eq_residual == 0.0);
  CHECK(zero.l1_residual == 0.0);
  CHECK_FALSE(zero.certified_critical_for_l1);
}

TEST_CASE("criticality of a PAMe limit") {
  Philox rng(4, 0);
  const ProblemInstance inst{DataMatrix(gaussian_matrix(4, 3, rng)), 2, std::nullopt};
  SolverConfig c;
  c.alpha = 1e-6;
  c.beta = 1.0;
  c.tol = 1e-12;
  c.max_iter = 5000;
  const StartPoint s = make_start(inst, 1);
  const SolveResult r = solve(inst, c, s.p, s.q);
  REQUIRE(r.converged);
  const CriticalityReport rep = criticality_report(inst.x, r.p_final, r.q_final, 1e-6);
  CHECK(rep.gen_eq_residual <= 1e-6);
  CHECK(rep.certified_critical_for_l1);
  CHECK(rep.l1_residual <= 1e-6);
}

TEST_CASE("subgrad_dist_l1 at a non-critical point is positive") {
  const Matrix q = Matrix::from_rows({{std::cos(0.3)}, {std::sin(0.3)}});
  bool flagged = true;
  CHECK(subgrad_dist_l1(kI2, q, 1e-12, &flagged) > 0.1);
  CHECK_FALSE(flagged);
}

TEST_CASE("oracle examples") {
  const OracleResult a = enumerate_oracle(kI2, 1);
  CHECK(a.value == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(a.q(0, 0)) == doctest::Approx(kR));
  CHECK(a.q(0, 0) * a.q(1, 0) > 0);

  const OracleResult b = enumerate_oracle(DataMatrix(Matrix::from_rows({{3, 0}, {0, 0}})), 1);
  CHECK(b.value == doctest::Approx(3.0));
  CHECK(std::abs(b.q(0, 0)) == doctest::Approx(1.0));

  CHECK(enumerate_oracle(DataMatrix(Matrix(2, 2)), 1).value == 0.0);

  Philox rng(1, 1);
  CHECK_THROWS_AS(enumerate_oracle(DataMatrix(gaussian_matrix(3, 12, rng)), 2), Error);
}

TEST_CASE("oracle dominates random feasible points") {
  Philox rng(3, 3);
  const DataMatrix x(gaussian_matrix(4, 3, rng));
  const OracleResult o = enumerate_oracle(x, 2);
  CHECK(objective_l1(x, o.q) == doctest::Approx(o.value));
  for (int t = 0; t < 200; ++t) CHECK(objective_l1(x, polar_factor(gaussian_matrix(4, 2, rng))) <= o.value + 1e-12);
}

TEST_CASE("build_critical_point examples") {
  const Matrix a = Matrix::from_rows({{2, 0}, {0, 0}, {0, 0}});
  const CriticalSetSpec spec = make_critical_set_spec(a, {1.0});
  CHECK(spec.rank == 1);
  CHECK(spec.block_sizes == std::vector<Index>{1});
  const Matrix v = Matrix::from_rows({{1}, {0}});
  const Matrix q = build_critical_point(spec, {Matrix::identity(1)}, v);
  CHECK(stiefel_residual(q) < 1e-12);
  CHECK(frobenius_norm(residual_R(a, q)) < 1e-12);
  CHECK(std::abs(q(0, 0)) == doctest::Approx(1.0));

  const CriticalSetSpec flipped = make_critical_set_spec(a, {-1.0});
  const Matrix qf = build_critical_point(flipped, {Matrix::identity(1)}, v);
  CHECK(frobenius_norm(residual_R(a, qf)) < 1e-12);
  CHECK(distance(qf, q) == doctest::Approx(2.0));

  const Matrix sq = Matrix::from_rows({{3, 0}, {0, 1}});
  const CriticalSetSpec ss = make_critical_set_spec(sq, {1.0, -1.0});
  const Matrix qd = build_critical_point(ss, {Matrix::identity(1), Matrix::identity(1)}, Matrix(0, 0));
  CHECK(distance(qd, Matrix::from_rows({{1, 0}, {0, -1}})) < 1e-12);

  CHECK_THROWS_AS(build_critical_point(spec, {2.0 * Matrix::identity(1)}, v), Error);
}

TEST_CASE("random critical points are critical") {
  Philox rng(6, 6);
  const Matrix u = polar_factor(gaussian_matrix(7, 4, rng));
  const Matrix w = polar_factor(gaussian_matrix(4, 4, rng));
  Matrix us = u;
  const double s[] = {3.0, 3.0, 1.0, 0.0};
  for (Index j = 0; j < 4; ++j)
    for (double& e : us.col(j)) e *= s[j];
  const Matrix a = matmul_nt(us, w);
  const CriticalSetSpec spec = make_critical_set_spec(a, {1.0, -1.0, 1.0});
  CHECK(spec.block_sizes == std::vector<Index>{2, 1});
  for (int t = 0; t < 20; ++t) {
    const Matrix q = random_critical_point(spec, rng);
    CHECK(stiefel_residual(q) < 1e-10);
    CHECK(frobenius_norm(residual_R(a, q)) < 1e-10);
  }
}

TEST_CASE("separation probe") {
  const SeparationReport scalar = critical_set_separation_probe(Matrix::from_rows({{1.5}}), {1.0}, {-1.0}, 10, 0);
  CHECK(scalar.min_distance == doctest::Approx(2.0));
  const Matrix a = Matrix::from_rows({{2, 0}, {0, 0}, {0, 0}});
  const SeparationReport r = critical_set_separation_probe(a, {1.0}, {-1.0}, 100, 3);
  CHECK(r.min_distance >= 2.0 - 1e-9);
  CHECK(r.samples == 100);
  const Matrix eq = Matrix::from_rows({{2, 0}, {0, 2}});
  CHECK_THROWS_AS(critical_set_separation_probe(eq, {1.0, -1.0}, {-1.0, 1.0}, 10, 0), Error);
}

TEST_CASE("kappa examples") {
  const KappaResult two = kappa_constant(Matrix::from_rows({{2, 0}, {0, 1}}));
  CHECK(two.p == 2);
  CHECK(two.delta_min == doctest::Approx(1.5));
  CHECK(two.kappa == doctest::Approx(5.6273).epsilon(1e-4));
  const KappaResult one = kappa_constant(Matrix::from_rows({{2}, {0}}));
  CHECK(one.p == 1);
  CHECK(one.kappa == doctest::Approx(1.8028).epsilon(1e-4));
  CHECK(one.eta_g == doctest::Approx(0.2774).epsilon(1e-3));
  CHECK_THROWS_AS(kappa_constant(Matrix(2, 2)), Error);
}

TEST_CASE("error bound probe") {
  const ErrorBoundReport k1 = error_bound_probe(Matrix::from_rows({{2}, {0}}), {1.0}, 300, 1.0, 5);
  CHECK(k1.pass);
  CHECK(k1.accepted == 300);
  CHECK(k1.worst_ratio <= k1.kappa);
  const ErrorBoundReport sq = error_bound_probe(Matrix::from_rows({{2, 0}, {0, 1}}), {1.0, 1.0}, 300, 0.5, 5);
  CHECK(sq.pass);
  CHECK(sq.worst_ratio <= 5.6273);
  try {
    error_bound_probe(Matrix::from_rows({{2, 0}, {0, 1}, {0, 0}}), {1.0, 1.0}, 10, 0.5, 0);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kRefused);
  }
}

TEST_CASE("KL probe at the known optimum") {
  const Matrix qs = Matrix::from_rows({{kR}, {kR}});
  const auto res = kl_ratio_probe(kI2, qs, {0.1}, 1000, 2);
  REQUIRE(res.size() == 1);
  CHECK(res[0].min_ratio > 0.0);
  CHECK(std::isfinite(res[0].min_ratio));
  const auto hres = kl_ratio_probe_h(kI2, Matrix::from_rows({{1}, {1}}), qs, {0.1}, 1000, 2);
  CHECK(hres[0].min_ratio > 0.0);
  CHECK_THROWS_AS(kl_ratio_probe(kI2, Matrix::from_rows({{std::cos(0.3)}, {std::sin(0.3)}}), {0.1}, 10, 0), Error);
}

TEST_CASE("KL probe all-flat sentinel") {
  // with X = 0 every sample has the same value
  const auto res = kl_ratio_probe(DataMatrix(Matrix(2, 2)), Matrix::from_rows({{1}, {0}}), {0.1}, 50, 0);
  CHECK(res[0].all_skipped);
  CHECK(std::isinf(res[0].min_ratio));
}

TEST_CASE("sandwich probe") {
  const SandwichReport r = sandwich_probe({2, 5, 20}, {1, 2, 5}, 300, 1);
  CHECK(r.samples == 300);
  CHECK(r.violations == 0);
  CHECK(r.worst_lower_ratio >= 1.0 - 1e-12);
  CHECK(r.worst_upper_ratio <= 1.0 + 1e-12);
}

TEST_CASE("audit refusals and vacuous run") {
  const ProblemInstance zero{DataMatrix(Matrix(2, 3)), 1, std::nullopt};
  SolverConfig c;
  c.method = Method::kPAM;
  c.theorem_mode = true;
  c.record_audit = true;
  const SolveResult r = solve(zero, c, Matrix(3, 1, 1.0), Matrix::from_rows({{1}, {0}}));
  const AuditReport rep = decrease_and_error_audit(r);
  CHECK(rep.pass);
  CHECK(rep.decrease_violations == 0);
  CHECK(rep.kappa1 == doctest::Approx(std::min(0.5, (1.0 / 1.5) / 4)));

  SolverConfig plain;
  const SolveResult nr = solve(zero, plain, Matrix(3, 1, 1.0), Matrix::from_rows({{1}, {0}}));
  CHECK_THROWS_AS(decrease_and_error_audit(nr), Error);
}
