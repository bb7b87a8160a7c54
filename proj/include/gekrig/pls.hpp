#pragma once

#include <cstddef>

#include "gekrig/types.hpp"

namespace gekrig {

/// Single-response partial least squares (PLS1) fitted by deflation on
/// column-centered data.
struct PlsDecomposition {
  Matrix weights;     // d x h, unit-norm columns w_l
  Matrix loadings;    // d x h, columns p_l
  Matrix rotations;   // d x h, W (P^T W)^-1
  Matrix scores;      // n x h, t_l = X_{l-1} w_l = X_c rotations
  Vector y_loadings;  // h, regression of the deflated response on t_l
  Vector x_mean;      // d
  double y_mean = 0.0;

  Eigen::Index components() const { return weights.cols(); }

  /// Inner linear model y_mean + (x - x_mean)^T rotations * y_loadings, one
  /// prediction per row of `X`.
  Vector predict(const Matrix& X) const;
};

/// Fits h components. Each weight vector is the normalized X_{l-1}^T y_{l-1},
/// sign-canonicalized so that its first nonzero entry is nonnegative.
///
/// Throws InvalidArgument when h is 0 or exceeds min(n-1, d), or when X has
/// fewer than two distinct rows; DegenerateResponse when y (or a deflated
/// residual) carries no covariance with X; SingularRotation when P^T W cannot
/// be inverted.
PlsDecomposition fit_pls(const Matrix& X, const Vector& y, std::size_t h);

/// As fit_pls, but when the deflated response runs out of covariance with the
/// inputs before h components, returns the components found so far instead of
/// throwing. Used on FOTA clouds, whose responses are exactly linear.
PlsDecomposition fit_pls_truncating(const Matrix& X, const Vector& y, std::size_t h);

}  // namespace gekrig
