#pragma once

#include <vector>

#include "l1pca/matrix.hpp"

namespace l1pca {

// M = U diag(sigma) V^T with k = min(rows, cols) terms.
struct ThinSvd {
  Matrix u;                   // rows x k, orthonormal columns
  std::vector<double> sigma;  // k values, nonincreasing, >= 0
  Matrix v;                   // cols x k, orthonormal columns

  Index rank(double rel_tol) const;
};

// One-sided (Hestenes) Jacobi: rotations are chosen from the entries of the
// Gram matrix M^T M but applied to the columns of M, so accuracy tracks the
// conditioning of M rather than of M^T M. Cost per sweep is O(d K^2).
// Columns whose singular value falls below the rank tolerance get U columns
// completed deterministically from the canonical basis. Each V column is
// signed so its largest-magnitude entry is positive.
ThinSvd thin_svd(const Matrix& m);

// All singular values of m, nonincreasing.
std::vector<double> singular_values(const Matrix& m);

// Orthogonal Procrustes solution U V^T: the maximiser of <M, Q> over
// St(d, K). Requires rows >= cols.
Matrix polar_factor(const Matrix& m);

// Extends the orthonormal columns of `basis` to `cols` orthonormal columns by
// Gram-Schmidt against canonical basis vectors.
Matrix complete_orthonormal(const Matrix& basis, Index cols);

// Power iteration on X^T X from a fixed pseudo-random start. The returned s
// satisfies s <= ||X||, and s (1 + rel_tol) >= ||X|| once the iteration has
// locked onto the dominant direction.
double spectral_norm(const DataMatrix& x, double rel_tol);

// ||Q^T Q - I||_F
double stiefel_residual(const Matrix& q);

void require_finite(const Matrix& m, const char* what);

}  // namespace l1pca
