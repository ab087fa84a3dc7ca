#pragma once

#include <cstdint>
#include <vector>

#include "l1pca/matrix.hpp"

namespace l1pca {

// ||X^T Q||_F^2 over the sum of the K largest squared singular values of X.
double tev(const DataMatrix& x, const Matrix& q);
// Same with the singular values of X supplied (nonincreasing).
double tev(const DataMatrix& x, const Matrix& q, const std::vector<double>& sigma);

struct ClusterReport {
  double accuracy = 0.0;
  double inertia = 0.0;    // within-cluster sum of squares of the best restart
  Index best_restart = 0;
  bool degenerate = false; // all projected points coincide
  std::vector<Index> assignment;
};

// Projects samples onto Q (coordinates Q^T x_i), runs Lloyd's algorithm with
// k-means++ seeding `restarts` times, keeps the lowest inertia, and scores the
// best one-to-one matching of clusters to labels. The label set must have
// exactly k distinct values.
ClusterReport kmeans_accuracy(const DataMatrix& x, const Matrix& q, const std::vector<long long>& labels,
                              Index k, Index restarts, std::uint64_t seed);

// Matching accuracy of an assignment against labels (both length n).
double assignment_accuracy(const std::vector<Index>& assignment, const std::vector<long long>& labels, Index k);

inline constexpr Index kLargeScaleDim = 10000;
inline constexpr Index kLargeScaleK = 50;

// Smallest K whose leading squared singular values reach `threshold` of the
// total; 50 when min(n, d) >= 10000.
Index choose_K_by_variance(const DataMatrix& x, double threshold);

}  // namespace l1pca
