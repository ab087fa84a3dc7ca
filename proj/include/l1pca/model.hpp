#pragma once

#include <optional>
#include <vector>

#include "l1pca/matrix.hpp"

namespace l1pca {

// d x K with orthonormal columns.
using StiefelPoint = Matrix;
// n x K with entries exactly +1 or -1.
using SignMatrix = Matrix;

inline constexpr double kFeasibleTol = 1e-8;
inline constexpr double kPreconditionTol = 1e-6;

struct ProblemInstance {
  DataMatrix x;  // d x n, samples are columns
  Index k = 1;
  std::optional<std::vector<long long>> labels;

  Index d() const { return x.rows(); }
  Index n() const { return x.cols(); }

  // Throws kInvalidInput unless 1 <= K <= min(n, d), X is finite, and any
  // labels have length n.
  void validate() const;
};

// Throws kPrecondition if stiefel_residual(q) > tol or q is not d x K.
void require_stiefel(const Matrix& q, double tol, const char* what);
// Throws kPrecondition unless every entry is exactly +1 or -1.
void require_signs(const Matrix& p, const char* what);
bool is_sign_matrix(const Matrix& p);

// ||X^T Q||_1 (the objective being maximised).
double objective_l1(const DataMatrix& x, const Matrix& q);

// h(P, Q) = -<P, X^T Q>
double objective_h(const DataMatrix& x, const Matrix& p, const Matrix& q);

// h(P, Q) + beta/2 ||Q - Q'||_F^2
double potential_psi(const DataMatrix& x, const Matrix& p, const Matrix& q,
                     const Matrix& q_prev, double beta);

// R(Q) = A - Q A^T Q
Matrix residual_R(const Matrix& a, const Matrix& q);

// Distance from 0 to A + N_St(Q): ||R - Q (Q^T R) / 2||_F. Bracketed by
// ||R||/2 and ||R||.
double subgrad_dist_linear(const Matrix& a, const Matrix& q);

// The P block is a finite set, so its normal cone is the whole space and
// only the Q block contributes.
double subgrad_dist_h(const DataMatrix& x, const Matrix& p, const Matrix& q);

// Entrywise sign of m; a zero entry keeps the previous value.
Matrix sign_select(const Matrix& m, const Matrix& p_prev);

}  // namespace l1pca
