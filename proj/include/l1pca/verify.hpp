#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "l1pca/linalg.hpp"
#include "l1pca/model.hpp"
#include "l1pca/solvers.hpp"

namespace l1pca {

class Philox;

// ---- criticality -----------------------------------------------------------

struct AlphaCheck {
  bool holds = false;
  double threshold = 0.0;  // min nonzero |(X^T Q*)_ij|, 0 when none
  bool vacuous = false;    // every entry was zero
};

// Entries with |v| <= zero_tol count as zero.
AlphaCheck check_alpha_condition(const DataMatrix& x, const Matrix& q_star, double alpha_star,
                                 double zero_tol = 0.0);

struct CriticalityReport {
  double h_residual = 0.0;
  double gen_eq_residual = 0.0;
  double alpha_condition_threshold = 0.0;
  double alpha_star_used = 0.0;
  bool certified_critical_for_l1 = false;
  bool vacuous = false;
  double l1_residual = 0.0;
};

CriticalityReport criticality_report(const DataMatrix& x, const Matrix& p_star, const Matrix& q_star,
                                     double alpha_star, double zero_tol = 0.0);

// P* == sign_select(P* + X^T Q* / alpha, P*) entrywise.
bool fixed_point_inclusion(const DataMatrix& x, const Matrix& p_star, const Matrix& q_star, double alpha);

// Exact dist(0, d l(Q)) for l(Q) = -||X^T Q||_1 on St(d, K): the minimum of
// subgrad_dist_linear(-X xi, Q) over sign choices at zero entries of X^T Q.
// More than `max_enumerated` zero entries falls back to +1 there and sets
// *flagged.
double subgrad_dist_l1(const DataMatrix& x, const Matrix& q, double zero_tol = 1e-12,
                       bool* flagged = nullptr, int max_enumerated = 12);

// ---- global oracle ---------------------------------------------------------

inline constexpr Index kOracleMaxBits = 22;

struct OracleResult {
  double value = 0.0;  // max ||X^T Q||_1
  Matrix p;
  Matrix q;
};

// Exhaustive search over all 2^(nK) sign matrices; the value of P is the
// nuclear norm of X P. Refuses nK > kOracleMaxBits.
OracleResult enumerate_oracle(const DataMatrix& x, Index k);

// ---- critical sets of <A, Q> on St(d, K) -----------------------------------

struct CriticalSetSpec {
  Matrix a;
  std::vector<double> q;             // length r, entries +-1
  std::vector<Index> block_sizes;    // h_1..h_p
  std::vector<double> block_values;  // distinct singular values, decreasing
  Index rank = 0;
  Matrix u_full;  // d x d
  Matrix v_full;  // K x K
};

inline constexpr double kSingularTieTol = 1e-9;
inline constexpr double kRankTol = 1e-12;

CriticalSetSpec make_critical_set_spec(const Matrix& a, std::vector<double> q,
                                       double tie_tol = kSingularTieTol);

// U_A [U diag(q) U^T, 0; 0, V] V_A^T with U = blkdiag(u_blocks).
Matrix build_critical_point(const CriticalSetSpec& spec, const std::vector<Matrix>& u_blocks,
                            const Matrix& v);

// A member with Haar-like random blocks.
Matrix random_critical_point(const CriticalSetSpec& spec, Philox& rng);

struct SeparationReport {
  double min_distance = std::numeric_limits<double>::infinity();
  Index samples = 0;
};

SeparationReport critical_set_separation_probe(const Matrix& a, const std::vector<double>& q,
                                               const std::vector<double>& q_prime, Index samples,
                                               std::uint64_t seed);

struct KappaResult {
  double kappa = 0.0;
  double eta_g = 0.0;
  Index p = 0;
  double delta_min = 0.0;  // +inf when p = 1
  double a_r = 0.0;
  double a_norm = 0.0;
};

KappaResult kappa_constant(const Matrix& a, double tie_tol = kSingularTieTol);

struct ErrorBoundReport {
  double worst_ratio = 0.0;
  double kappa = 0.0;
  Index accepted = 0;
  Index attempts = 0;
  Index violations = 0;
  bool pass = false;
};

// Supported: K = 1, or d = K = rank(A) with distinct singular values. Both
// make the critical set a single point. Samples polar(Qbar + t xi) with
// t in (0, radius] and keeps those with 0 < dist < 1.
ErrorBoundReport error_bound_probe(const Matrix& a, const std::vector<double>& q, Index samples,
                                   double radius, std::uint64_t seed);

// ---- KL probes -------------------------------------------------------------

struct KlRadiusResult {
  double radius = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  Index used = 0;
  Index skipped = 0;
  Index flagged = 0;
  bool all_skipped = false;
};

// min over samples of dist(0, d l(Q)) / |l(Q) - l(Q*)|^{1/2}.
std::vector<KlRadiusResult> kl_ratio_probe(const DataMatrix& x, const Matrix& q_star,
                                           const std::vector<double>& radii, Index samples,
                                           std::uint64_t seed);

// Same with h(P*, .) and subgrad_dist_h.
std::vector<KlRadiusResult> kl_ratio_probe_h(const DataMatrix& x, const Matrix& p_star,
                                             const Matrix& q_star, const std::vector<double>& radii,
                                             Index samples, std::uint64_t seed);

// ---- sandwich --------------------------------------------------------------

struct SandwichReport {
  Index samples = 0;
  Index violations = 0;
  double worst_lower_ratio = std::numeric_limits<double>::infinity();  // min dist / (||R||/2)
  double worst_upper_ratio = 0.0;                                      // max dist / ||R||
};

SandwichReport sandwich_probe(const std::vector<Index>& dims, const std::vector<Index>& ks,
                              Index samples, std::uint64_t seed, double rel_tol = 1e-12);

// ---- decrease and relative-error audit -------------------------------------

struct AuditReport {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Index steps = 0;
  Index decrease_violations = 0;
  Index error_violations = 0;
  double worst_decrease_slack = -std::numeric_limits<double>::infinity();
  double worst_error_slack = -std::numeric_limits<double>::infinity();
  bool pass = false;
};

inline constexpr double kAuditSlack = 1e-10;

// Requires a theorem-mode PAMe/PAM run with record_audit.
AuditReport decrease_and_error_audit(const SolveResult& run, double slack = kAuditSlack);

}  // namespace l1pca
