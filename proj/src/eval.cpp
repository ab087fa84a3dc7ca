#include "l1pca/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "l1pca/error.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/model.hpp"
#include "l1pca/random.hpp"

namespace l1pca {

namespace {

constexpr int kMaxLloydIter = 300;

double sq_dist(const double* a, const double* b, Index k) {
  double s = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

// Points stored row-wise: point i occupies pts[i*dim .. i*dim+dim).
struct Lloyd {
  std::vector<Index> assign;
  double inertia = 0.0;
};

Lloyd run_lloyd(const std::vector<double>& pts, Index n, Index dim, Index k, Philox& rng) {
  std::vector<double> centers(static_cast<std::size_t>(k * dim));
  auto point = [&](Index i) { return pts.data() + i * dim; };
  auto center = [&](Index c) { return centers.data() + c * dim; };

  // k-means++ seeding.
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  std::copy(point(first), point(first) + dim, center(0));
  for (Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], sq_dist(point(i), center(c - 1), dim));
      total += d2[static_cast<std::size_t>(i)];
    }
    Index pick = n - 1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    std::copy(point(pick), point(pick) + dim, center(c));
  }

  Lloyd out;
  out.assign.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> sums(centers.size());
  std::vector<Index> counts(static_cast<std::size_t>(k));
  for (int it = 0; it < kMaxLloydIter; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double bd = sq_dist(point(i), center(0), dim);
      for (Index c = 1; c < k; ++c) {
        const double dc = sq_dist(point(i), center(c), dim);
        if (dc < bd) {
          bd = dc;
          best = c;
        }
      }
      if (out.assign[static_cast<std::size_t>(i)] != best) {
        out.assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      const Index c = out.assign[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(c)];
      for (Index t = 0; t < dim; ++t) sums[static_cast<std::size_t>(c * dim + t)] += point(i)[t];
    }
    for (Index c = 0; c < k; ++c) {
      const Index cnt = counts[static_cast<std::size_t>(c)];
      if (cnt == 0) continue;  // empty cluster keeps its centre
      for (Index t = 0; t < dim; ++t)
        center(c)[t] = sums[static_cast<std::size_t>(c * dim + t)] / static_cast<double>(cnt);
    }
  }
  for (Index i = 0; i < n; ++i) out.inertia += sq_dist(point(i), center(out.assign[static_cast<std::size_t>(i)]), dim);
  return out;
}

// Maximum-weight perfect matching on a square weight matrix (Hungarian
// algorithm on negated weights). Returns the matched total.
double hungarian_max(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(n + 1), minv(n + 1);
  std::vector<std::size_t> p(n + 1), way(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += w[p[j] - 1][j - 1];
  return total;
}

std::vector<Index> label_indices(const std::vector<long long>& labels, Index& distinct) {
  std::map<long long, Index> ids;
  for (long long l : labels) ids.emplace(l, 0);
  Index next = 0;
  for (auto& [l, id] : ids) id = next++;
  distinct = next;
  std::vector<Index> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

}  // namespace

double tev(const DataMatrix& x, const Matrix& q, const std::vector<double>& sigma) {
  require_stiefel(q, kPreconditionTol, "tev");
  if (q.rows() != x.rows()) throw Error(ErrorKind::kDimensionMismatch, "tev: Q must have d rows");
  if (x.is_zero()) throw Error(ErrorKind::kUndefinedMetric, "tev: X = 0");
  double denom = 0.0;
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(q.cols()), sigma.size());
  for (std::size_t i = 0; i < k; ++i) denom += sigma[i] * sigma[i];
  if (!(denom > 0.0)) throw Error(ErrorKind::kUndefinedMetric, "tev: zero explained variation");
  return squared_norm(x.tmul(q)) / denom;
}

double tev(const DataMatrix& x, const Matrix& q) {
  if (x.is_zero()) throw Error(ErrorKind::kUndefinedMetric, "tev: X = 0");
  return tev(x, q, singular_values(x.to_dense()));
}

double assignment_accuracy(const std::vector<Index>& assignment, const std::vector<long long>& labels, Index k) {
  if (assignment.size() != labels.size() || labels.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "assignment and labels must have the same nonzero length");
  }
  Index distinct = 0;
  const auto lid = label_indices(labels, distinct);
  if (distinct > k) throw Error(ErrorKind::kInvalidInput, "more distinct labels than clusters");
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> w(kk, std::vector<double>(kk, 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Index c = assignment[i];
    if (c < 0 || c >= k) throw Error(ErrorKind::kInvalidInput, "cluster index out of range");
    w[static_cast<std::size_t>(c)][static_cast<std::size_t>(lid[i])] += 1.0;
  }
  double best = 0.0;
  if (k <= 8) {
    std::vector<std::size_t> perm(kk);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double s = 0.0;
      for (std::size_t c = 0; c < kk; ++c) s += w[c][perm[c]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    best = hungarian_max(w);
  }
  return best / static_cast<double>(labels.size());
}

ClusterReport kmeans_accuracy(const DataMatrix& x, const Matrix& q, const std::vector<long long>& labels, Index k,
                              Index restarts, std::uint64_t seed) {
  require_stiefel(q, kPreconditionTol, "kmeans_accuracy");
  if (q.rows() != x.rows()) throw Error(ErrorKind::kDimensionMismatch, "kmeans_accuracy: Q must have d rows");
  const Index n = x.cols();
  if (static_cast<Index>(labels.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch, "kmeans_accuracy: need one label per sample");
  }
  if (k < 1 || k > n) throw Error(ErrorKind::kInvalidInput, "kmeans_accuracy: need 1 <= k <= n");
  if (restarts < 1) throw Error(ErrorKind::kInvalidInput, "kmeans_accuracy: restarts must be >= 1");
  Index distinct = 0;
  label_indices(labels, distinct);
  if (distinct != k) {
    throw Error(ErrorKind::kInvalidInput, "kmeans_accuracy: labels have " + std::to_string(distinct) +
                                              " distinct values, expected k = " + std::to_string(k));
  }

  const Matrix proj = x.tmul(q);  // n x K, row i is sample i
  const Index dim = q.cols();
  std::vector<double> pts(static_cast<std::size_t>(n * dim));
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < dim; ++t) pts[static_cast<std::size_t>(i * dim + t)] = proj(i, t);

  ClusterReport rep;
  bool identical = true;
  for (Index i = 1; i < n && identical; ++i)
    for (Index t = 0; t < dim; ++t)
      if (pts[static_cast<std::size_t>(i * dim + t)] != pts[static_cast<std::size_t>(t)]) {
        identical = false;
        break;
      }
  if (identical) {
    std::map<long long, Index> counts;
    for (long long l : labels) ++counts[l];
    Index top = 0;
    for (const auto& [l, c] : counts) top = std::max(top, c);
    rep.degenerate = true;
    rep.accuracy = static_cast<double>(top) / static_cast<double>(n);
    rep.assignment.assign(static_cast<std::size_t>(n), 0);
    return rep;
  }

  std::vector<Lloyd> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic, 1)
  for (Index r = 0; r < restarts; ++r) {
    Philox rng(seed, static_cast<std::uint64_t>(r));
    runs[static_cast<std::size_t>(r)] = run_lloyd(pts, n, dim, k, rng);
  }
  Index best = 0;
  for (Index r = 1; r < restarts; ++r)
    if (runs[static_cast<std::size_t>(r)].inertia < runs[static_cast<std::size_t>(best)].inertia) best = r;

  rep.best_restart = best;
  rep.inertia = runs[static_cast<std::size_t>(best)].inertia;
  rep.assignment = std::move(runs[static_cast<std::size_t>(best)].assign);
  rep.accuracy = assignment_accuracy(rep.assignment, labels, k);
  return rep;
}

Index choose_K_by_variance(const DataMatrix& x, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "choose_K_by_variance: threshold must lie in (0, 1]");
  }
  if (!x.all_finite()) throw Error(ErrorKind::kInvalidInput, "choose_K_by_variance: non-finite entries");
  if (x.is_zero()) throw Error(ErrorKind::kUndefinedMetric, "choose_K_by_variance: X = 0");
  if (std::min(x.rows(), x.cols()) >= kLargeScaleDim) return kLargeScaleK;
  auto sigma = singular_values(x.to_dense());
  const double cut = static_cast<double>(std::max(x.rows(), x.cols())) *
                     std::numeric_limits<double>::epsilon() * sigma.front();
  double total = 0.0;
  for (double& s : sigma) {
    if (s <= cut) s = 0.0;
    total += s * s;
  }
  const double target = threshold * total * (1.0 - 1e-12);
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    acc += sigma[i] * sigma[i];
    if (acc >= target) return static_cast<Index>(i + 1);
  }
  return static_cast<Index>(sigma.size());
}

}  // namespace l1pca
