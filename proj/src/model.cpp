#include "l1pca/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"

namespace l1pca {

void ProblemInstance::validate() const {
  if (k < 1 || k > std::min(d(), n())) {
    throw Error(ErrorKind::kInvalidInput,
                "K must satisfy 1 <= K <= min(n, d); got K=" + std::to_string(k) +
                    " with d=" + std::to_string(d()) + ", n=" + std::to_string(n()));
  }
  if (!x.all_finite()) throw Error(ErrorKind::kInvalidInput, "data matrix has non-finite entries");
  if (labels && static_cast<Index>(labels->size()) != n()) {
    throw Error(ErrorKind::kDimensionMismatch, "label count does not match sample count");
  }
}

void require_stiefel(const Matrix& q, double tol, const char* what) {
  if (q.cols() < 1 || q.rows() < q.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, std::string(what) + ": expected d x K with d >= K >= 1");
  }
  require_finite(q, what);
  const double r = stiefel_residual(q);
  if (r > tol) {
    throw Error(ErrorKind::kPrecondition,
                std::string(what) + ": not on the Stiefel manifold (residual " + std::to_string(r) + ")");
  }
}

bool is_sign_matrix(const Matrix& p) {
  return std::all_of(p.values().begin(), p.values().end(),
                     [](double v) { return v == 1.0 || v == -1.0; });
}

void require_signs(const Matrix& p, const char* what) {
  if (!is_sign_matrix(p)) {
    throw Error(ErrorKind::kPrecondition, std::string(what) + ": entries must be exactly +1 or -1");
  }
}

namespace {

void check_q_dims(const DataMatrix& x, const Matrix& q) {
  if (q.rows() != x.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "Q must have as many rows as X");
  }
}

void check_p_dims(const DataMatrix& x, const Matrix& p, const Matrix& q) {
  check_q_dims(x, q);
  if (p.rows() != x.cols() || p.cols() != q.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "P must be n x K");
  }
}

}  // namespace

double objective_l1(const DataMatrix& x, const Matrix& q) {
  check_q_dims(x, q);
  return l1_norm(x.tmul(q));
}

double objective_h(const DataMatrix& x, const Matrix& p, const Matrix& q) {
  check_p_dims(x, p, q);
  return -inner(p, x.tmul(q));
}

double potential_psi(const DataMatrix& x, const Matrix& p, const Matrix& q,
                     const Matrix& q_prev, double beta) {
  if (beta < 0.0) throw Error(ErrorKind::kInvalidInput, "potential_psi: beta must be >= 0");
  if (q_prev.rows() != q.rows() || q_prev.cols() != q.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "potential_psi: Q and Q' differ in shape");
  }
  const double h = objective_h(x, p, q);
  if (beta == 0.0) return h;
  const double dq = distance(q, q_prev);
  return h + 0.5 * beta * dq * dq;
}

Matrix residual_R(const Matrix& a, const Matrix& q) {
  if (a.rows() != q.rows() || a.cols() != q.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "residual_R: A and Q differ in shape");
  }
  return a - matmul(q, matmul_tn(a, q));
}

double subgrad_dist_linear(const Matrix& a, const Matrix& q) {
  require_stiefel(q, kPreconditionTol, "subgrad_dist_linear");
  Matrix r = residual_R(a, q);
  Matrix proj = matmul(q, matmul_tn(q, r));
  proj *= 0.5;
  r -= proj;
  return frobenius_norm(r);
}

double subgrad_dist_h(const DataMatrix& x, const Matrix& p, const Matrix& q) {
  check_p_dims(x, p, q);
  require_signs(p, "subgrad_dist_h");
  return subgrad_dist_linear(-x.mul(p), q);
}

Matrix sign_select(const Matrix& m, const Matrix& p_prev) {
  if (m.rows() != p_prev.rows() || m.cols() != p_prev.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "sign_select: shape mismatch");
  }
  require_finite(m, "sign_select");
  Matrix out(m.rows(), m.cols());
  const auto mv = m.values();
  const auto pv = p_prev.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < mv.size(); ++i) {
    ov[i] = mv[i] > 0.0 ? 1.0 : (mv[i] < 0.0 ? -1.0 : pv[i]);
  }
  return out;
}

}  // namespace l1pca
