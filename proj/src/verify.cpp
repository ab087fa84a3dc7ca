#include "l1pca/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l1pca/error.hpp"
#include "l1pca/random.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace l1pca {

namespace {

Matrix zero_small(const Matrix& m, double zero_tol) {
  Matrix out = m;
  for (double& v : out.values())
    if (std::abs(v) <= zero_tol) v = 0.0;
  return out;
}

void require_pq(const DataMatrix& x, const Matrix& p, const Matrix& q) {
  require_stiefel(q, kPreconditionTol, "Q*");
  if (q.rows() != x.rows()) throw Error(ErrorKind::kDimensionMismatch, "Q* must have d rows");
  if (p.rows() != x.cols() || p.cols() != q.cols()) throw Error(ErrorKind::kDimensionMismatch, "P* must be n x K");
  require_signs(p, "P*");
}

Matrix random_orthogonal(Index h, Philox& rng) { return polar_factor(gaussian_matrix(h, h, rng)); }

Matrix unit_gaussian(Index rows, Index cols, Philox& rng) {
  Matrix g = gaussian_matrix(rows, cols, rng);
  g *= 1.0 / frobenius_norm(g);
  return g;
}

std::uint64_t stream_id(std::uint64_t hi, std::uint64_t lo) { return (hi << 32) | (lo & 0xffffffffULL); }

}  // namespace

AlphaCheck check_alpha_condition(const DataMatrix& x, const Matrix& q_star, double alpha_star,
                                 double zero_tol) {
  if (!(alpha_star > 0.0)) throw Error(ErrorKind::kInvalidInput, "alpha_* must be > 0");
  if (!(zero_tol >= 0.0)) throw Error(ErrorKind::kInvalidInput, "zero_tol must be >= 0");
  require_stiefel(q_star, kPreconditionTol, "Q*");
  const Matrix y = x.tmul(q_star);
  AlphaCheck out;
  double t = std::numeric_limits<double>::infinity();
  for (double v : y.values())
    if (std::abs(v) > zero_tol) t = std::min(t, std::abs(v));
  if (std::isinf(t)) {
    out.vacuous = true;
    out.threshold = 0.0;
    out.holds = false;
    return out;
  }
  out.threshold = t;
  out.holds = alpha_star < t;
  return out;
}

CriticalityReport criticality_report(const DataMatrix& x, const Matrix& p_star, const Matrix& q_star,
                                     double alpha_star, double zero_tol) {
  require_pq(x, p_star, q_star);
  const AlphaCheck ac = check_alpha_condition(x, q_star, alpha_star, zero_tol);
  const Matrix y = zero_small(x.tmul(q_star), zero_tol);

  CriticalityReport r;
  r.alpha_star_used = alpha_star;
  r.alpha_condition_threshold = ac.threshold;
  r.vacuous = ac.vacuous;
  r.certified_critical_for_l1 = ac.holds;
  r.h_residual = subgrad_dist_h(x, p_star, q_star);

  Matrix shifted(p_star.rows(), p_star.cols());
  for (Index j = 0; j < shifted.cols(); ++j)
    for (Index i = 0; i < shifted.rows(); ++i) shifted(i, j) = p_star(i, j) + y(i, j) / alpha_star;
  r.gen_eq_residual = subgrad_dist_linear(-x.mul(sign_select(shifted, p_star)), q_star);
  r.l1_residual = subgrad_dist_linear(-x.mul(sign_select(y, p_star)), q_star);
  return r;
}

bool fixed_point_inclusion(const DataMatrix& x, const Matrix& p_star, const Matrix& q_star, double alpha) {
  require_pq(x, p_star, q_star);
  const Matrix y = x.tmul(q_star);
  Matrix shifted(p_star.rows(), p_star.cols());
  for (Index j = 0; j < shifted.cols(); ++j)
    for (Index i = 0; i < shifted.rows(); ++i) shifted(i, j) = p_star(i, j) + y(i, j) / alpha;
  return sign_select(shifted, p_star) == p_star;
}

double subgrad_dist_l1(const DataMatrix& x, const Matrix& q, double zero_tol, bool* flagged,
                       int max_enumerated) {
  require_stiefel(q, kPreconditionTol, "subgrad_dist_l1");
  const Matrix y = x.tmul(q);
  const double tol = zero_tol * std::max(1.0, max_abs(y));
  Matrix xi(y.rows(), y.cols());
  std::vector<std::size_t> zeros;
  const auto yv = y.values();
  auto sv = xi.values();
  for (std::size_t i = 0; i < yv.size(); ++i) {
    if (std::abs(yv[i]) <= tol) {
      zeros.push_back(i);
      sv[i] = 1.0;
    } else {
      sv[i] = yv[i] > 0.0 ? 1.0 : -1.0;
    }
  }
  if (flagged) *flagged = false;
  if (zeros.empty()) return subgrad_dist_linear(-x.mul(xi), q);
  if (static_cast<int>(zeros.size()) > max_enumerated) {
    if (flagged) *flagged = true;
    return subgrad_dist_linear(-x.mul(xi), q);
  }
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t combos = 1ULL << zeros.size();
  for (std::uint64_t m = 0; m < combos; ++m) {
    for (std::size_t b = 0; b < zeros.size(); ++b) sv[zeros[b]] = (m >> b) & 1ULL ? -1.0 : 1.0;
    best = std::min(best, subgrad_dist_linear(-x.mul(xi), q));
  }
  return best;
}

OracleResult enumerate_oracle(const DataMatrix& x, Index k) {
  const Index n = x.cols();
  if (k < 1 || k > std::min(x.rows(), n)) {
    throw Error(ErrorKind::kInvalidInput, "enumerate_oracle: need 1 <= K <= min(n, d)");
  }
  if (n * k > kOracleMaxBits) {
    throw Error(ErrorKind::kRefused, "enumerate_oracle: nK = " + std::to_string(n * k) + " exceeds the cap of " +
                                         std::to_string(kOracleMaxBits));
  }
  if (!x.all_finite()) throw Error(ErrorKind::kInvalidInput, "enumerate_oracle: non-finite entries");
  const Matrix xd = x.to_dense();
  const Index bits = n * k;
  const std::int64_t total = std::int64_t{1} << bits;

  double best_value = -1.0;
  std::int64_t best_mask = 0;
#pragma omp parallel
  {
    double local_value = -1.0;
    std::int64_t local_mask = 0;
    Matrix p(n, k);
#pragma omp for schedule(static)
    for (std::int64_t m = 0; m < total; ++m) {
      auto pv = p.values();
      for (Index t = 0; t < bits; ++t) pv[static_cast<std::size_t>(t)] = (m >> t) & 1 ? -1.0 : 1.0;
      const auto s = singular_values(matmul(xd, p));
      double v = 0.0;
      for (double si : s) v += si;
      if (v > local_value) {
        local_value = v;
        local_mask = m;
      }
    }
#pragma omp critical(l1pca_oracle_reduce)
    {
      if (local_value > best_value || (local_value == best_value && local_mask < best_mask)) {
        best_value = local_value;
        best_mask = local_mask;
      }
    }
  }

  OracleResult out;
  out.value = best_value;
  out.p = Matrix(n, k);
  auto pv = out.p.values();
  for (Index t = 0; t < bits; ++t) pv[static_cast<std::size_t>(t)] = (best_mask >> t) & 1 ? -1.0 : 1.0;
  out.q = polar_factor(matmul(xd, out.p));
  return out;
}

CriticalSetSpec make_critical_set_spec(const Matrix& a, std::vector<double> q, double tie_tol) {
  if (a.rows() < a.cols() || a.cols() < 1) {
    throw Error(ErrorKind::kInvalidInput, "critical set: A must be d x K with d >= K >= 1");
  }
  const ThinSvd svd = thin_svd(a);
  CriticalSetSpec s;
  s.a = a;
  const double smax = svd.sigma.front();
  for (double v : svd.sigma)
    if (smax > 0.0 && v > kRankTol * smax) ++s.rank;
  if (static_cast<Index>(q.size()) != s.rank) {
    throw Error(ErrorKind::kDimensionMismatch, "critical set: q must have length rank(A) = " + std::to_string(s.rank));
  }
  for (double v : q)
    if (v != 1.0 && v != -1.0) throw Error(ErrorKind::kInvalidInput, "critical set: q entries must be +-1");
  s.q = std::move(q);
  for (Index i = 0; i < s.rank; ++i) {
    const double v = svd.sigma[static_cast<std::size_t>(i)];
    if (i > 0 && s.block_values.back() - v <= tie_tol * s.block_values.back()) {
      ++s.block_sizes.back();
    } else {
      s.block_values.push_back(v);
      s.block_sizes.push_back(1);
    }
  }
  s.u_full = complete_orthonormal(svd.u, a.rows());
  s.v_full = svd.v;
  return s;
}

Matrix build_critical_point(const CriticalSetSpec& spec, const std::vector<Matrix>& u_blocks, const Matrix& v) {
  const Index d = spec.a.rows();
  const Index k = spec.a.cols();
  const Index r = spec.rank;
  if (u_blocks.size() != spec.block_sizes.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "build_critical_point: need one orthogonal block per distinct value");
  }
  if (v.rows() != d - r || v.cols() != k - r) {
    throw Error(ErrorKind::kDimensionMismatch, "build_critical_point: V must be (d - r) x (K - r)");
  }
  if (k - r > 0 && stiefel_residual(v) > 1e-10) {
    throw Error(ErrorKind::kPrecondition, "build_critical_point: V is not on the Stiefel manifold");
  }
  Matrix qq(d, k);
  Index off = 0;
  for (std::size_t b = 0; b < u_blocks.size(); ++b) {
    const Index h = spec.block_sizes[b];
    const Matrix& ub = u_blocks[b];
    if (ub.rows() != h || ub.cols() != h) {
      throw Error(ErrorKind::kDimensionMismatch, "build_critical_point: block " + std::to_string(b) + " must be " +
                                                     std::to_string(h) + " x " + std::to_string(h));
    }
    if (stiefel_residual(ub) > 1e-10) {
      throw Error(ErrorKind::kPrecondition, "build_critical_point: block " + std::to_string(b) + " is not orthogonal");
    }
    Matrix scaled = ub;
    for (Index j = 0; j < h; ++j)
      for (double& e : scaled.col(j)) e *= spec.q[static_cast<std::size_t>(off + j)];
    const Matrix blk = matmul_nt(scaled, ub);
    for (Index j = 0; j < h; ++j)
      for (Index i = 0; i < h; ++i) qq(off + i, off + j) = blk(i, j);
    off += h;
  }
  for (Index j = 0; j < k - r; ++j)
    for (Index i = 0; i < d - r; ++i) qq(r + i, r + j) = v(i, j);
  return matmul_nt(matmul(spec.u_full, qq), spec.v_full);
}

Matrix random_critical_point(const CriticalSetSpec& spec, Philox& rng) {
  std::vector<Matrix> blocks;
  for (Index h : spec.block_sizes) blocks.push_back(random_orthogonal(h, rng));
  const Index dr = spec.a.rows() - spec.rank;
  const Index kr = spec.a.cols() - spec.rank;
  Matrix v(dr, kr);
  if (kr > 0) v = polar_factor(gaussian_matrix(dr, kr, rng));
  return build_critical_point(spec, blocks, v);
}

SeparationReport critical_set_separation_probe(const Matrix& a, const std::vector<double>& q,
                                               const std::vector<double>& q_prime, Index samples,
                                               std::uint64_t seed) {
  const CriticalSetSpec s1 = make_critical_set_spec(a, q);
  CriticalSetSpec s2 = s1;
  if (static_cast<Index>(q_prime.size()) != s1.rank) {
    throw Error(ErrorKind::kDimensionMismatch, "separation probe: q' must have length rank(A)");
  }
  for (double v : q_prime)
    if (v != 1.0 && v != -1.0) throw Error(ErrorKind::kInvalidInput, "separation probe: q' entries must be +-1");
  s2.q = q_prime;

  bool differs = false;
  Index off = 0;
  for (Index h : s1.block_sizes) {
    const auto pos = [&](const std::vector<double>& v) {
      return std::count(v.begin() + off, v.begin() + off + h, 1.0);
    };
    if (pos(q) != pos(q_prime)) differs = true;
    off += h;
  }
  if (!differs) {
    throw Error(ErrorKind::kPrecondition,
                "separation probe: q and q' have equal sign counts in every block, so the sets coincide");
  }

  SeparationReport rep;
  rep.samples = samples;
  std::vector<double> dists(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < samples; ++i) {
    Philox rng(seed, static_cast<std::uint64_t>(i));
    const Matrix a1 = random_critical_point(s1, rng);
    const Matrix a2 = random_critical_point(s2, rng);
    dists[static_cast<std::size_t>(i)] = distance(a1, a2);
  }
  for (double d : dists) rep.min_distance = std::min(rep.min_distance, d);
  return rep;
}

KappaResult kappa_constant(const Matrix& a, double tie_tol) {
  require_finite(a, "kappa_constant");
  if (max_abs(a) == 0.0) throw Error(ErrorKind::kInvalidInput, "kappa_constant: A must be nonzero");
  const auto sigma = singular_values(a);
  const double smax = sigma.front();
  std::vector<double> values;
  double a_r = smax;
  for (double v : sigma) {
    if (v <= kRankTol * smax) break;
    a_r = v;
    if (values.empty() || values.back() - v > tie_tol * values.back()) values.push_back(v);
  }
  KappaResult out;
  out.p = static_cast<Index>(values.size());
  out.a_r = a_r;
  out.a_norm = smax;
  if (out.p == 1) {
    out.delta_min = std::numeric_limits<double>::infinity();
    out.kappa = std::sqrt(13.0) / a_r;
  } else {
    double dmin2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (i == j) continue;
        const double delta = values[i] / values[j] - values[j] / values[i];
        dmin2 = std::min(dmin2, delta * delta);
      }
    out.delta_min = std::sqrt(dmin2);
    const double p = static_cast<double>(out.p);
    out.kappa = std::sqrt(13.0 + 6.0 * (6.0 * p - 5.0) / dmin2) / a_r;
  }
  out.eta_g = 1.0 / std::sqrt(2.0 * out.kappa * out.kappa * out.a_norm);
  return out;
}

ErrorBoundReport error_bound_probe(const Matrix& a, const std::vector<double>& q, Index samples, double radius,
                                   std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error(ErrorKind::kInvalidInput, "error_bound_probe: radius must be > 0");
  const CriticalSetSpec spec = make_critical_set_spec(a, q);
  const Index d = a.rows();
  const Index k = a.cols();
  const bool all_distinct = std::all_of(spec.block_sizes.begin(), spec.block_sizes.end(),
                                        [](Index h) { return h == 1; });
  const bool regime_a = k == 1 && spec.rank == 1;
  const bool regime_b = d == k && spec.rank == k && all_distinct;
  if (!regime_a && !regime_b) {
    throw Error(ErrorKind::kRefused,
                "error_bound_probe: distance to the critical set is only computed exactly for K = 1 or for "
                "d = K = rank(A) with distinct singular values");
  }
  std::vector<Matrix> ones;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) ones.emplace_back(1, 1, 1.0);
  const Matrix target = build_critical_point(spec, ones, Matrix(d - spec.rank, 0));

  ErrorBoundReport rep;
  rep.kappa = kappa_constant(a).kappa;
  const Index max_attempts = 50 * std::max<Index>(samples, 1);
  while (rep.accepted < samples && rep.attempts < max_attempts) {
    Philox rng(seed, static_cast<std::uint64_t>(rep.attempts));
    ++rep.attempts;
    const Matrix xi = unit_gaussian(d, k, rng);
    const double t = radius * rng.uniform_open();
    Matrix m = target;
    Matrix step = xi;
    step *= t;
    m += step;
    const Matrix qs = polar_factor(m);
    const double dist = distance(qs, target);
    if (!(dist < 1.0) || dist == 0.0) continue;
    ++rep.accepted;
    const double rn = frobenius_norm(residual_R(a, qs));
    const double ratio = rn > 0.0 ? dist / rn : std::numeric_limits<double>::infinity();
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (ratio > rep.kappa) ++rep.violations;
  }
  rep.pass = rep.violations == 0 && rep.accepted == samples;
  return rep;
}

namespace {

// Shared sampler for the two KL probes. `eval` returns (dist, gap, flagged)
// at a sample; gap is the objective difference to the centre.
struct KlSample {
  double dist = 0.0;
  double gap = 0.0;
  bool flagged = false;
  bool inside = false;
};

template <class Eval>
std::vector<KlRadiusResult> kl_probe_impl(const Matrix& q_star, const std::vector<double>& radii, Index samples,
                                          std::uint64_t seed, double flat_tol, Eval eval) {
  const Index d = q_star.rows();
  const Index k = q_star.cols();
  std::vector<KlRadiusResult> out;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double radius = radii[ri];
    if (!(radius > 0.0)) throw Error(ErrorKind::kInvalidInput, "kl probe: radii must be > 0");
    std::vector<KlSample> res(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < samples; ++s) {
      Philox rng(seed, stream_id(ri + 1, static_cast<std::uint64_t>(s)));
      Matrix xi = gaussian_matrix(d, k, rng);
      Matrix sym = matmul_tn(q_star, xi);
      sym = 0.5 * (sym + sym.transpose());
      xi -= matmul(q_star, sym);
      const double xn = frobenius_norm(xi);
      KlSample& out_s = res[static_cast<std::size_t>(s)];
      if (xn == 0.0) continue;
      xi *= radius * rng.uniform_open() / xn;
      const Matrix q = polar_factor(q_star + xi);
      if (distance(q, q_star) > radius) continue;
      out_s.inside = true;
      eval(q, out_s);
    }
    KlRadiusResult r;
    r.radius = radius;
    for (const auto& s : res) {
      if (!s.inside || std::abs(s.gap) <= flat_tol) {
        ++r.skipped;
        continue;
      }
      ++r.used;
      if (s.flagged) ++r.flagged;
      r.min_ratio = std::min(r.min_ratio, s.dist / std::sqrt(std::abs(s.gap)));
    }
    r.all_skipped = r.used == 0;
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<KlRadiusResult> kl_ratio_probe(const DataMatrix& x, const Matrix& q_star,
                                           const std::vector<double>& radii, Index samples, std::uint64_t seed) {
  require_stiefel(q_star, kPreconditionTol, "Q*");
  if (q_star.rows() != x.rows()) throw Error(ErrorKind::kDimensionMismatch, "Q* must have d rows");
  const double centre_dist = subgrad_dist_l1(x, q_star);
  if (centre_dist > 1e-8) {
    throw Error(ErrorKind::kPrecondition,
                "kl probe: Q* is not critical for l (residual " + std::to_string(centre_dist) + ")");
  }
  const double l_star = -objective_l1(x, q_star);
  const double flat_tol = 1e-13 * std::max(1.0, std::abs(l_star));
  return kl_probe_impl(q_star, radii, samples, seed, flat_tol, [&](const Matrix& q, KlSample& s) {
    s.gap = -objective_l1(x, q) - l_star;
    s.dist = subgrad_dist_l1(x, q, 1e-12, &s.flagged);
  });
}

std::vector<KlRadiusResult> kl_ratio_probe_h(const DataMatrix& x, const Matrix& p_star, const Matrix& q_star,
                                             const std::vector<double>& radii, Index samples,
                                             std::uint64_t seed) {
  require_pq(x, p_star, q_star);
  const double centre_dist = subgrad_dist_h(x, p_star, q_star);
  if (centre_dist > 1e-8) {
    throw Error(ErrorKind::kPrecondition,
                "kl probe: (P*, Q*) is not critical for h (residual " + std::to_string(centre_dist) + ")");
  }
  const double h_star = objective_h(x, p_star, q_star);
  const double flat_tol = 1e-13 * std::max(1.0, std::abs(h_star));
  return kl_probe_impl(q_star, radii, samples, seed, flat_tol, [&](const Matrix& q, KlSample& s) {
    s.gap = objective_h(x, p_star, q) - h_star;
    s.dist = subgrad_dist_h(x, p_star, q);
  });
}

SandwichReport sandwich_probe(const std::vector<Index>& dims, const std::vector<Index>& ks, Index samples,
                              std::uint64_t seed, double rel_tol) {
  if (dims.empty() || ks.empty()) throw Error(ErrorKind::kInvalidInput, "sandwich probe: empty dimension lists");
  struct One {
    double lower_ratio = std::numeric_limits<double>::infinity();
    double upper_ratio = 0.0;
    bool violated = false;
  };
  std::vector<One> res(static_cast<std::size_t>(samples));
  const auto nd = static_cast<Index>(dims.size());
  const auto nk = static_cast<Index>(ks.size());
#pragma omp parallel for schedule(static)
  for (Index s = 0; s < samples; ++s) {
    const Index d = dims[static_cast<std::size_t>(s % nd)];
    const Index k = std::min(d, ks[static_cast<std::size_t>((s / nd) % nk)]);
    Philox rng(seed, static_cast<std::uint64_t>(s));
    Matrix a = gaussian_matrix(d, k, rng);
    a *= std::exp(2.0 * rng.normal());
    const Matrix q = polar_factor(gaussian_matrix(d, k, rng));
    const double rn = frobenius_norm(residual_R(a, q));
    const double dist = subgrad_dist_linear(a, q);
    One& o = res[static_cast<std::size_t>(s)];
    if (rn > 0.0) {
      o.lower_ratio = dist / (0.5 * rn);
      o.upper_ratio = dist / rn;
    }
    o.violated = dist < 0.5 * rn * (1.0 - rel_tol) || dist > rn * (1.0 + rel_tol);
  }
  SandwichReport rep;
  rep.samples = samples;
  for (const auto& o : res) {
    rep.worst_lower_ratio = std::min(rep.worst_lower_ratio, o.lower_ratio);
    rep.worst_upper_ratio = std::max(rep.worst_upper_ratio, o.upper_ratio);
    if (o.violated) ++rep.violations;
  }
  return rep;
}

AuditReport decrease_and_error_audit(const SolveResult& run, double slack) {
  if (!run.bounds) throw Error(ErrorKind::kRefused, "audit: run was not made in theorem mode");
  if (run.method != Method::kPAMe && run.method != Method::kPAM) {
    throw Error(ErrorKind::kRefused, "audit: only pame and pam runs are covered");
  }
  if (run.iterations > 0 && run.audit.size() != static_cast<std::size_t>(run.iterations)) {
    throw Error(ErrorKind::kPrecondition, "audit: run did not record audit data (set record_audit)");
  }
  const TheoremBounds& b = *run.bounds;
  const double gamma_star = run.method == Method::kPAM ? 0.0 : b.gamma_star;
  AuditReport rep;
  rep.kappa1 = std::min(b.alpha_star * (1.0 - gamma_star) / 2.0, b.beta_star / 4.0);
  const double db = b.beta_sup - b.beta_star;
  rep.kappa2 = std::sqrt(std::max(3.0 * b.alpha_sup * b.alpha_sup,
                                  db * db + b.beta_star * b.beta_star + 3.0 * b.x_norm * b.x_norm));
  for (const AuditStep& s : run.audit) {
    const double dec = s.psi_after - s.psi_before + rep.kappa1 * s.delta_C * s.delta_C;
    const double err = s.subgrad_norm - rep.kappa2 * s.delta_C;
    rep.worst_decrease_slack = std::max(rep.worst_decrease_slack, dec);
    rep.worst_error_slack = std::max(rep.worst_error_slack, err);
    if (dec > slack) ++rep.decrease_violations;
    if (err > slack) ++rep.error_violations;
    ++rep.steps;
  }
  rep.pass = rep.decrease_violations == 0 && rep.error_violations == 0;
  return rep;
}

}  // namespace l1pca
