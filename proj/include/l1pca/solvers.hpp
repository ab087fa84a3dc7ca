#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l1pca/error.hpp"
#include "l1pca/model.hpp"

namespace l1pca {

enum class Method { kPAMe, kPAM, kFPM, kPDCAe, kIPALM, kGiPALM };

std::string_view to_string(Method m);
// Accepts the lowercase CLI names (pame, pam, fpm, pdcae, ipalm, gipalm).
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

// Constant when it holds one value, otherwise per-iteration with the last
// value repeated once the list runs out.
struct Schedule {
  std::vector<double> values{0.0};

  Schedule() = default;
  Schedule(double v) : values{v} {}  // NOLINT(google-explicit-constructor)
  explicit Schedule(std::vector<double> v) : values(std::move(v)) {}

  double at(Index k) const;
  double min() const;
  double max() const;
};

struct MethodParams {
  Index restart_interval = 10;          // pDCAe fixed restart period
  std::optional<double> gamma_p;        // iPALM/GiPALM P-block override
  std::optional<double> gamma_q;        // iPALM/GiPALM Q-block override
};

struct SolverConfig {
  Method method = Method::kPAMe;
  Schedule alpha{1.0};
  Schedule beta{1.0};
  // Unset means the method's own default: 0 for PAMe, a restarted
  // accelerated sequence for pDCAe, the inertial schedules for iPALM/GiPALM.
  std::optional<Schedule> gamma;
  std::optional<double> alpha_star;  // default: alpha.min()
  std::optional<double> alpha_sup;   // default: alpha.max()
  std::optional<double> beta_star;   // default: (2/3) beta.min()
  std::optional<double> beta_sup;    // default: beta.max()
  Index max_iter = 1000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool theorem_mode = false;
  // Keep the per-iteration quantities the decrease/error audit needs.
  bool record_audit = false;
  MethodParams params;

  void validate() const;
};

// Resolved bounds under which the convergence theory applies.
struct TheoremBounds {
  double alpha_star = 0.0;
  double alpha_sup = 0.0;
  double beta_star = 0.0;
  double beta_sup = 0.0;
  double gamma_star = 0.0;  // min{1, alpha_* beta_* / (2 ||X||^2)}
  double x_norm = 0.0;      // upper-adjusted estimate of ||X||
};

// Checks every scheduled alpha, beta, gamma against the bounds and returns
// them. Throws kPrecondition naming the first violated condition.
TheoremBounds check_theorem_mode(const ProblemInstance& inst, const SolverConfig& cfg);

struct TraceRecord {
  Index k = 0;
  double h_value = 0.0;
  double psi_value = 0.0;
  double delta_P_norm = 0.0;
  double delta_Q_norm = 0.0;
  double delta_C_norm = 0.0;
  double wall_time_seconds = 0.0;

  // Everything except wall time.
  bool same_values(const TraceRecord& o) const;
};

using IterateTrace = std::vector<TraceRecord>;

bool same_values(const IterateTrace& a, const IterateTrace& b);

// Per-iteration inputs to the decrease and relative-error inequalities.
struct AuditStep {
  Index k = 0;              // the step maps C^k to C^{k+1}
  double psi_before = 0.0;  // Psi at C^k, beta_*
  double psi_after = 0.0;   // Psi at C^{k+1}, beta_*
  double delta_C = 0.0;
  double subgrad_norm = 0.0;  // norm of the constructed element of dPsi(C^{k+1})
};

enum class Termination { kConverged, kMaxIter };
std::string_view to_string(Termination t);

struct SolveResult {
  Method method = Method::kPAMe;
  Matrix p_final;
  Matrix q_final;
  IterateTrace trace;
  Index iterations = 0;
  bool converged = false;
  Termination termination = Termination::kMaxIter;
  double beta_star = 0.0;
  std::optional<TheoremBounds> bounds;  // set in theorem mode
  std::vector<AuditStep> audit;          // filled when record_audit is set
};

// Diverged or degenerate runs keep the trace up to the failure.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, IterateTrace trace)
      : Error(kind, what), trace_(std::move(trace)) {}
  const IterateTrace& trace() const noexcept { return trace_; }

 private:
  IterateTrace trace_;
};

struct StartPoint {
  Matrix p;
  Matrix q;
};

// Q0 = polar factor of a seeded Gaussian d x K matrix;
// P0 = sign_select(X^T Q0, all ones).
StartPoint make_start(const ProblemInstance& inst, std::uint64_t seed);

SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg,
                  const Matrix& p0, const Matrix& q0);

SolveResult pame_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);
SolveResult pam_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);
SolveResult fpm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);
SolveResult pdcae_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);
SolveResult ipalm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);
SolveResult gipalm_solve(const ProblemInstance& inst, SolverConfig cfg, const Matrix& p0, const Matrix& q0);

// Extrapolation weights used by pDCAe at iteration k (0-based) when no
// explicit gamma is configured.
double pdcae_default_gamma(Index k, Index restart_interval);
// (k - 1) / (k + 2) with k counted from 1, clipped at 0.
double ipalm_gamma(Index k);

struct ComparisonEntry {
  SolverConfig config;
  std::optional<SolveResult> result;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

// Runs every config from the same start point, derived from `start_seed`.
// Per-config failures are recorded and the batch continues.
std::vector<ComparisonEntry> run_comparison(const ProblemInstance& inst,
                                            const std::vector<SolverConfig>& configs,
                                            std::uint64_t start_seed);

}  // namespace l1pca
