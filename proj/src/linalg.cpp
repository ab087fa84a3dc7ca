#include "l1pca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "l1pca/error.hpp"
#include "l1pca/random.hpp"

namespace l1pca {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 80;

double col_dot(const Matrix& a, Index p, const Matrix& b, Index q) {
  const auto x = a.col(p);
  const auto y = b.col(q);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void rotate_cols(Matrix& m, Index p, Index q, double c, double s) {
  auto x = m.col(p);
  auto y = m.col(q);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xp = x[i];
    const double xq = y[i];
    x[i] = c * xp - s * xq;
    y[i] = s * xp + c * xq;
  }
}

// Subtract projections onto the first `count` columns of basis, twice.
void orthogonalize(std::span<double> v, const Matrix& basis, Index count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < count; ++j) {
      const auto b = basis.col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += b[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s * b[i];
    }
  }
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Fill column `target` of `u` with the canonical basis vector whose
// component orthogonal to columns [0, target) is largest.
void complete_column(Matrix& u, Index target) {
  const Index d = u.rows();
  std::vector<double> best;
  double best_norm = -1.0;
  std::vector<double> cand(static_cast<std::size_t>(d));
  for (Index e = 0; e < d; ++e) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[static_cast<std::size_t>(e)] = 1.0;
    orthogonalize(cand, u, target);
    const double nv = norm(cand);
    if (nv > best_norm + 1e-12) {
      best_norm = nv;
      best = cand;
    }
  }
  if (best_norm <= 0.0) {
    throw Error(ErrorKind::kInvalidInput, "cannot complete basis: no room left");
  }
  auto col = u.col(target);
  for (Index i = 0; i < d; ++i) col[i] = best[static_cast<std::size_t>(i)] / best_norm;
  orthogonalize(col, u, target);
  const double nv = norm(col);
  for (double& x : col) x /= nv;
}

struct JacobiResult {
  Matrix w;  // columns mutually orthogonal
  Matrix v;  // accumulated rotations
};

JacobiResult one_sided_jacobi(const Matrix& m) {
  const Index k = m.cols();
  JacobiResult r{m, Matrix::identity(k)};
  const double tol = std::max<double>(static_cast<double>(m.rows()), 1.0) * kEps;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < k; ++p) {
      for (Index q = p + 1; q < k; ++q) {
        const double alpha = col_dot(r.w, p, r.w, p);
        const double beta = col_dot(r.w, q, r.w, q);
        const double gamma = col_dot(r.w, p, r.w, q);
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_cols(r.w, p, q, c, s);
        rotate_cols(r.v, p, q, c, s);
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  return r;
}

// SVD for rows >= cols.
ThinSvd thin_svd_tall(const Matrix& m) {
  const Index d = m.rows();
  const Index k = m.cols();
  auto jac = one_sided_jacobi(m);

  std::vector<double> norms(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) norms[static_cast<std::size_t>(j)] = norm(jac.w.col(j));
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });

  ThinSvd out{Matrix(d, k), std::vector<double>(static_cast<std::size_t>(k)), Matrix(k, k)};
  const double smax = k > 0 ? norms[static_cast<std::size_t>(order[0])] : 0.0;
  const double rank_tol = static_cast<double>(std::max(d, k)) * kEps * smax;

  Index accepted = 0;
  std::vector<Index> deficient;
  for (Index j = 0; j < k; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    const double s = norms[static_cast<std::size_t>(src)];
    out.sigma[static_cast<std::size_t>(j)] = s;
    auto vcol = out.v.col(j);
    const auto vsrc = jac.v.col(src);
    std::copy(vsrc.begin(), vsrc.end(), vcol.begin());
    if (s > rank_tol && s > 0.0) {
      auto ucol = out.u.col(j);
      const auto wsrc = jac.w.col(src);
      for (Index i = 0; i < d; ++i) ucol[i] = wsrc[i] / s;
      ++accepted;
    } else {
      out.sigma[static_cast<std::size_t>(j)] = s > 0.0 ? s : 0.0;
      deficient.push_back(j);
    }
  }
  // Deficient columns are the trailing ones because of the sort.
  for (Index j : deficient) complete_column(out.u, j);

  for (Index j = 0; j < k; ++j) {
    auto vcol = out.v.col(j);
    Index imax = 0;
    for (Index i = 1; i < k; ++i)
      if (std::abs(vcol[i]) > std::abs(vcol[imax])) imax = i;
    if (vcol[imax] < 0.0) {
      for (double& x : vcol) x = -x;
      for (double& x : out.u.col(j)) x = -x;
    }
  }
  return out;
}

}  // namespace

Index ThinSvd::rank(double rel_tol) const {
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cut = rel_tol * sigma.front();
  return static_cast<Index>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > cut; }));
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) {
    throw Error(ErrorKind::kInvalidInput, std::string(what) + ": non-finite entries");
  }
}

ThinSvd thin_svd(const Matrix& m) {
  require_finite(m, "thin_svd");
  if (m.rows() < 1 || m.cols() < 1) {
    throw Error(ErrorKind::kInvalidInput, "thin_svd: empty matrix");
  }
  if (m.rows() >= m.cols()) return thin_svd_tall(m);

  // Wide case: factor the transpose and swap roles, then restore the sign
  // convention on the new V.
  ThinSvd t = thin_svd_tall(m.transpose());
  ThinSvd out{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  for (Index j = 0; j < out.v.cols(); ++j) {
    auto vcol = out.v.col(j);
    Index imax = 0;
    for (Index i = 1; i < out.v.rows(); ++i)
      if (std::abs(vcol[i]) > std::abs(vcol[imax])) imax = i;
    if (vcol[imax] < 0.0) {
      for (double& x : vcol) x = -x;
      for (double& x : out.u.col(j)) x = -x;
    }
  }
  return out;
}

std::vector<double> singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.empty()) return {};
  const Matrix tall = m.rows() >= m.cols() ? m : m.transpose();
  auto jac = one_sided_jacobi(tall);
  std::vector<double> s(static_cast<std::size_t>(tall.cols()));
  for (Index j = 0; j < tall.cols(); ++j) s[static_cast<std::size_t>(j)] = norm(jac.w.col(j));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

Matrix polar_factor(const Matrix& m) {
  if (m.rows() < m.cols() || m.cols() < 1) {
    throw Error(ErrorKind::kInvalidInput, "polar_factor: requires d >= K >= 1");
  }
  const ThinSvd svd = thin_svd(m);
  return matmul_nt(svd.u, svd.v);
}

Matrix complete_orthonormal(const Matrix& basis, Index cols) {
  if (cols < basis.cols() || cols > basis.rows()) {
    throw Error(ErrorKind::kInvalidInput, "complete_orthonormal: bad target column count");
  }
  Matrix out(basis.rows(), cols);
  for (Index j = 0; j < basis.cols(); ++j) {
    const auto src = basis.col(j);
    std::copy(src.begin(), src.end(), out.col(j).begin());
  }
  for (Index j = basis.cols(); j < cols; ++j) complete_column(out, j);
  return out;
}

double spectral_norm(const DataMatrix& x, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "spectral_norm: rel_tol must lie in (0, 1)");
  }
  if (!x.all_finite()) throw Error(ErrorKind::kInvalidInput, "spectral_norm: non-finite entries");
  if (x.is_zero()) return 0.0;

  constexpr int kMaxIter = 20000;
  Philox rng(0x5eedULL, 0x9e37ULL);
  Matrix v = gaussian_matrix(x.cols(), 1, rng);
  v *= 1.0 / frobenius_norm(v);

  double estimate = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Matrix w = x.mul(v);
    const double lambda = squared_norm(w);
    estimate = std::max(estimate, std::sqrt(lambda));
    Matrix u = x.tmul(w);
    const double unorm = frobenius_norm(u);
    if (unorm == 0.0) break;
    Matrix r = u;
    for (Index i = 0; i < r.rows(); ++i) r(i, 0) -= lambda * v(i, 0);
    if (frobenius_norm(r) <= rel_tol * lambda) break;
    u *= 1.0 / unorm;
    v = std::move(u);
  }
  return estimate;
}

double stiefel_residual(const Matrix& q) {
  require_finite(q, "stiefel_residual");
  Matrix g = matmul_tn(q, q);
  for (Index i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

}  // namespace l1pca
