#include "l1pca/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "l1pca/linalg.hpp"
#include "l1pca/random.hpp"

namespace l1pca {

namespace {

constexpr double kNormRelTol = 1e-6;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool uses_alpha(Method m) {
  return m == Method::kPAMe || m == Method::kPAM || m == Method::kIPALM || m == Method::kGiPALM;
}

// M = base + scale * m (entrywise m / step when step is the divisor).
Matrix add_scaled_div(const Matrix& base, const Matrix& m, double step) {
  Matrix out(base.rows(), base.cols());
  const auto b = base.values();
  const auto v = m.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] + v[i] / step;
  return out;
}

// base + g (base - prev)
Matrix extrapolate(const Matrix& base, const Matrix& prev, double g) {
  Matrix out(base.rows(), base.cols());
  const auto b = base.values();
  const auto p = prev.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] + g * (b[i] - p[i]);
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kPAMe: return "pame";
    case Method::kPAM: return "pam";
    case Method::kFPM: return "fpm";
    case Method::kPDCAe: return "pdcae";
    case Method::kIPALM: return "ipalm";
    case Method::kGiPALM: return "gipalm";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::kConfig, "unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::kPAMe, Method::kPAM, Method::kFPM,
                                           Method::kPDCAe, Method::kIPALM, Method::kGiPALM};
  return methods;
}

std::string_view to_string(Termination t) {
  return t == Termination::kConverged ? "converged" : "max_iter";
}

double Schedule::at(Index k) const {
  if (values.empty()) throw Error(ErrorKind::kConfig, "empty schedule");
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(k), values.size() - 1);
  return values[i];
}

double Schedule::min() const {
  if (values.empty()) throw Error(ErrorKind::kConfig, "empty schedule");
  return *std::min_element(values.begin(), values.end());
}

double Schedule::max() const {
  if (values.empty()) throw Error(ErrorKind::kConfig, "empty schedule");
  return *std::max_element(values.begin(), values.end());
}

void SolverConfig::validate() const {
  auto finite_all = [](const Schedule& s) {
    return !s.values.empty() &&
           std::all_of(s.values.begin(), s.values.end(), [](double v) { return std::isfinite(v); });
  };
  if (max_iter < 0) throw Error(ErrorKind::kConfig, "max_iter must be >= 0");
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw Error(ErrorKind::kConfig, "tol must be finite and >= 0");
  if (uses_alpha(method) && (!finite_all(alpha) || alpha.min() <= 0.0)) {
    throw Error(ErrorKind::kConfig, "alpha must be finite and > 0");
  }
  if (method != Method::kFPM && (!finite_all(beta) || beta.min() <= 0.0)) {
    throw Error(ErrorKind::kConfig, "beta must be finite and > 0");
  }
  if (gamma && (!finite_all(*gamma) || gamma->min() < 0.0 || gamma->max() > 1.0)) {
    throw Error(ErrorKind::kConfig, "gamma must lie in [0, 1]");
  }
  for (const auto& g : {params.gamma_p, params.gamma_q}) {
    if (g && !(*g >= 0.0 && *g <= 1.0)) throw Error(ErrorKind::kConfig, "gamma_p/gamma_q must lie in [0, 1]");
  }
  if (params.restart_interval < 1) throw Error(ErrorKind::kConfig, "restart interval must be >= 1");
  if (theorem_mode && method != Method::kPAMe && method != Method::kPAM) {
    throw Error(ErrorKind::kConfig, "theorem mode applies only to pame and pam");
  }
}

TheoremBounds check_theorem_mode(const ProblemInstance& inst, const SolverConfig& cfg) {
  cfg.validate();
  TheoremBounds b;
  b.alpha_star = cfg.alpha_star.value_or(cfg.alpha.min());
  b.alpha_sup = cfg.alpha_sup.value_or(cfg.alpha.max());
  b.beta_star = cfg.beta_star.value_or(cfg.beta.min() / 1.5);
  b.beta_sup = cfg.beta_sup.value_or(cfg.beta.max());

  if (!(b.alpha_star > 0.0)) {
    throw Error(ErrorKind::kPrecondition, "theorem mode (i): alpha_* must be > 0");
  }
  for (double a : cfg.alpha.values) {
    if (a < b.alpha_star || a > b.alpha_sup) {
      throw Error(ErrorKind::kPrecondition, "theorem mode (i): alpha_k = " + fmt(a) +
                                                " outside [alpha_*, alpha^*] = [" + fmt(b.alpha_star) +
                                                ", " + fmt(b.alpha_sup) + "]");
    }
  }
  if (!(b.beta_star > 0.0)) {
    throw Error(ErrorKind::kPrecondition, "theorem mode (ii): beta_* must be > 0");
  }
  for (double v : cfg.beta.values) {
    if (v / 1.5 < b.beta_star || v > b.beta_sup) {
      throw Error(ErrorKind::kPrecondition, "theorem mode (ii): beta_k = " + fmt(v) +
                                                " must satisfy 3 beta_*/2 <= beta_k <= beta^* with beta_* = " +
                                                fmt(b.beta_star) + ", beta^* = " + fmt(b.beta_sup));
    }
  }

  const double s = spectral_norm(inst.x, kNormRelTol);
  b.x_norm = s * (1.0 + kNormRelTol);
  b.gamma_star = b.x_norm == 0.0
                     ? 1.0
                     : std::min(1.0, b.alpha_star * b.beta_star / (2.0 * b.x_norm * b.x_norm));
  if (cfg.method == Method::kPAMe && cfg.gamma) {
    for (double g : cfg.gamma->values) {
      if (!(g < b.gamma_star)) {
        throw Error(ErrorKind::kPrecondition, "theorem mode (iii): gamma_k = " + fmt(g) +
                                                  " must be < gamma* = min{1, alpha_* beta_* / (2 ||X||^2)} = " +
                                                  fmt(b.gamma_star));
      }
    }
  }
  return b;
}

bool TraceRecord::same_values(const TraceRecord& o) const {
  return k == o.k && h_value == o.h_value && psi_value == o.psi_value &&
         delta_P_norm == o.delta_P_norm && delta_Q_norm == o.delta_Q_norm &&
         delta_C_norm == o.delta_C_norm;
}

bool same_values(const IterateTrace& a, const IterateTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same_values(b[i])) return false;
  return true;
}

double pdcae_default_gamma(Index k, Index restart_interval) {
  const Index j = k % restart_interval;
  double theta_prev = 1.0;
  double theta = 1.0;
  for (Index i = 0; i < j; ++i) {
    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    theta_prev = theta;
    theta = next;
  }
  return (theta_prev - 1.0) / theta;
}

double ipalm_gamma(Index k) {
  return std::max(0.0, static_cast<double>(k - 1) / static_cast<double>(k + 2));
}

StartPoint make_start(const ProblemInstance& inst, std::uint64_t seed) {
  inst.validate();
  Philox rng(seed, 0x5354415254ULL);
  StartPoint s;
  s.q = polar_factor(gaussian_matrix(inst.d(), inst.k, rng));
  s.p = sign_select(inst.x.tmul(s.q), Matrix(inst.n(), inst.k, 1.0));
  return s;
}

SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg, const Matrix& p0, const Matrix& q0) {
  using Clock = std::chrono::steady_clock;
  inst.validate();
  cfg.validate();
  if (p0.rows() != inst.n() || p0.cols() != inst.k) {
    throw Error(ErrorKind::kDimensionMismatch, "P0 must be n x K");
  }
  if (q0.rows() != inst.d() || q0.cols() != inst.k) {
    throw Error(ErrorKind::kDimensionMismatch, "Q0 must be d x K");
  }
  require_signs(p0, "P0");
  require_stiefel(q0, kFeasibleTol, "Q0");

  SolveResult res;
  res.method = cfg.method;
  if (cfg.theorem_mode) res.bounds = check_theorem_mode(inst, cfg);
  if (cfg.method == Method::kFPM) {
    res.beta_star = 0.0;
  } else if (res.bounds) {
    res.beta_star = res.bounds->beta_star;
  } else {
    res.beta_star = cfg.beta_star.value_or(cfg.beta.min() / 1.5);
  }
  const double beta_star = res.beta_star;
  const bool audit = cfg.record_audit && (cfg.method == Method::kPAMe || cfg.method == Method::kPAM);
  const double q_norm_cap = 2.0 * std::sqrt(static_cast<double>(inst.k));

  const DataMatrix& x = inst.x;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  Matrix p = p0;
  Matrix p_prev = p0;
  Matrix q = q0;
  Matrix q_prev = q0;
  Matrix xtq = x.tmul(q);
  {
    const double h0 = -inner(p, xtq);
    res.trace.push_back({0, h0, h0, 0.0, 0.0, 0.0, elapsed()});
  }

  auto fail = [&](ErrorKind kind, const std::string& what) {
    throw SolverError(kind, std::string(to_string(cfg.method)) + ": " + what, res.trace);
  };
  auto guard = [&](const Matrix& m, const char* what) {
    if (!m.all_finite()) fail(ErrorKind::kDiverged, std::string("non-finite ") + what);
  };

  for (Index k = 0; k < cfg.max_iter; ++k) {
    Matrix p_new;
    Matrix q_new;
    Matrix xp_new;
    Matrix xte;  // X^T E^k, kept for the audit
    double alpha_k = 0.0;

    switch (cfg.method) {
      case Method::kPAMe:
      case Method::kPAM: {
        const double g = cfg.method == Method::kPAM ? 0.0 : (cfg.gamma ? cfg.gamma->at(k) : 0.0);
        alpha_k = cfg.alpha.at(k);
        const Matrix e = extrapolate(q, q_prev, g);
        xte = x.tmul(e);
        guard(xte, "X^T E");
        const Matrix arg = add_scaled_div(p, xte, alpha_k);
        guard(arg, "P-update argument");
        p_new = sign_select(arg, p);
        xp_new = x.mul(p_new);
        const Matrix m = add_scaled_div(q, xp_new, cfg.beta.at(k));
        guard(m, "Q-update argument");
        q_new = polar_factor(m);
        break;
      }
      case Method::kFPM: {
        guard(xtq, "X^T Q");
        p_new = sign_select(xtq, p);
        xp_new = x.mul(p_new);
        if (max_abs(xp_new) == 0.0) fail(ErrorKind::kDegenerateUpdate, "X P vanished; polar factor undefined");
        guard(xp_new, "X P");
        q_new = polar_factor(xp_new);
        break;
      }
      case Method::kPDCAe: {
        const double g = cfg.gamma ? cfg.gamma->at(k) : pdcae_default_gamma(k, cfg.params.restart_interval);
        const Matrix e = extrapolate(q, q_prev, g);
        guard(xtq, "X^T Q");
        p_new = sign_select(xtq, p);
        xp_new = x.mul(p_new);
        const Matrix m = add_scaled_div(e, xp_new, cfg.beta.at(k));
        guard(m, "Q-update argument");
        q_new = polar_factor(m);
        break;
      }
      case Method::kIPALM:
      case Method::kGiPALM: {
        double gp;
        double gq;
        if (cfg.method == Method::kIPALM) {
          gp = gq = cfg.gamma ? cfg.gamma->at(k) : ipalm_gamma(k + 1);
        } else {
          gp = cfg.gamma ? cfg.gamma->at(k) : 0.5;
          gq = cfg.gamma ? cfg.gamma->at(k) : 0.25;
        }
        gp = cfg.params.gamma_p.value_or(gp);
        gq = cfg.params.gamma_q.value_or(gq);
        alpha_k = cfg.alpha.at(k);
        guard(xtq, "X^T Q");
        const Matrix p_bar = extrapolate(p, p_prev, gp);
        const Matrix arg = add_scaled_div(p_bar, xtq, alpha_k);
        guard(arg, "P-update argument");
        p_new = sign_select(arg, p);
        xp_new = x.mul(p_new);
        const Matrix q_bar = extrapolate(q, q_prev, gq);
        const Matrix m = add_scaled_div(q_bar, xp_new, cfg.beta.at(k));
        guard(m, "Q-update argument");
        q_new = polar_factor(m);
        break;
      }
    }

    Matrix xtq_new = x.tmul(q_new);
    const double h_new = -inner(p_new, xtq_new);
    const double dp = distance(p_new, p);
    const double dq = distance(q_new, q);
    const double dq_prev = distance(q, q_prev);
    const double dc = std::sqrt(dp * dp + dq * dq + dq_prev * dq_prev);
    const double psi_new = h_new + 0.5 * beta_star * dq * dq;
    res.trace.push_back({k + 1, h_new, psi_new, dp, dq, dc, elapsed()});

    if (!std::isfinite(h_new) || !std::isfinite(psi_new) || !std::isfinite(dc)) {
      fail(ErrorKind::kDiverged, "non-finite trace value at iteration " + std::to_string(k + 1));
    }
    if (frobenius_norm(q_new) > q_norm_cap) {
      fail(ErrorKind::kDiverged, "iterate left the Stiefel neighbourhood at iteration " + std::to_string(k + 1));
    }

    if (audit) {
      // Constructed element of dPsi(C^{k+1}): P block, Q block distance with
      // the beta_* shift, and the Q' block.
      Matrix t1 = xte - xtq_new;
      Matrix dpm = p_new - p;
      dpm *= alpha_k;
      t1 -= dpm;
      Matrix a = -xp_new;
      Matrix dqm = q_new - q;
      dqm *= beta_star;
      a += dqm;
      const double t2 = subgrad_dist_linear(a, q_new);
      const double t3 = beta_star * dq;
      const double n1 = frobenius_norm(t1);
      res.audit.push_back({k, res.trace[res.trace.size() - 2].psi_value, psi_new, dc,
                           std::sqrt(n1 * n1 + t2 * t2 + t3 * t3)});
    }

    p_prev = std::move(p);
    p = std::move(p_new);
    q_prev = std::move(q);
    q = std::move(q_new);
    xtq = std::move(xtq_new);
    res.iterations = k + 1;

    if (dc < cfg.tol) {
      res.converged = true;
      res.termination = Termination::kConverged;
      break;
    }
  }

  res.p_final = std::move(p);
  res.q_final = std::move(q);
  return res;
}

namespace {

SolveResult solve_as(Method m, const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0,
                     const Matrix& q0) {
  cfg.method = m;
  return solve(inst, cfg, p0, q0);
}

}  // namespace

SolveResult pame_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kPAMe, inst, std::move(cfg), p0, q0);
}
SolveResult pam_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kPAM, inst, std::move(cfg), p0, q0);
}
SolveResult fpm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kFPM, inst, std::move(cfg), p0, q0);
}
SolveResult pdcae_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kPDCAe, inst, std::move(cfg), p0, q0);
}
SolveResult ipalm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kIPALM, inst, std::move(cfg), p0, q0);
}
SolveResult gipalm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0) {
  return solve_as(Method::kGiPALM, inst, std::move(cfg), p0, q0);
}

std::vector<ComparisonEntry> run_comparison(const ProblemInstance& inst,
                                            const std::vector<SolverConfig>& configs,
                                            std::uint64_t start_seed) {
  const StartPoint start = make_start(inst, start_seed);
  std::vector<ComparisonEntry> out;
  out.reserve(configs.size());
  for (const auto& cfg : configs) {
    ComparisonEntry e;
    e.config = cfg;
    try {
      e.result = solve(inst, cfg, start.p, start.q);
    } catch (const Error& err) {
      e.error_kind = err.kind();
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace l1pca
