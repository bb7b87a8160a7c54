#include "gekrig/pls.hpp"

#include <cmath>
#include <sstream>

#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

constexpr double kExhaustedTol = 1e-10;
constexpr double kMaxRotationCondition = 1e12;

bool has_two_distinct_rows(const Matrix& X) {
  for (Eigen::Index i = 1; i < X.rows(); ++i)
    if ((X.row(i).array() != X.row(0).array()).any()) return true;
  return false;
}

PlsDecomposition fit_impl(const Matrix& X, const Vector& y, std::size_t h, bool truncate) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  require(y.size() == n, "pls: X and y row counts differ");
  require(h >= 1, "pls: need at least one component");
  require(static_cast<Eigen::Index>(h) <= std::min(n - 1, d),
          "pls: h must not exceed min(n-1, d)");
  require(X.allFinite() && y.allFinite(), "pls: non-finite input");
  require(has_two_distinct_rows(X), "pls: X needs at least two distinct rows");

  PlsDecomposition out;
  out.x_mean = X.colwise().mean().transpose();
  out.y_mean = y.mean();
  Matrix Xl = X.rowwise() - out.x_mean.transpose();
  Vector yl = y.array() - out.y_mean;

  const double y_scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  if (yl.cwiseAbs().maxCoeff() <= 1e-13 * y_scale)
    fail(ErrorCode::DegenerateResponse, "pls: response has zero variance");

  const auto H = static_cast<Eigen::Index>(h);
  Matrix W(d, H), P(d, H), T(n, H);
  Vector c(H);
  Eigen::Index found = 0;
  double first_norm = 0.0;
  const double cov_floor = 1e-14 * Xl.norm() * yl.norm();

  for (Eigen::Index l = 0; l < H; ++l) {
    Vector v = Xl.transpose() * yl;
    const double vn = v.norm();
    if (l == 0) {
      if (!(vn > cov_floor))
        fail(ErrorCode::DegenerateResponse, "pls: response has no covariance with the inputs");
      first_norm = vn;
    } else if (!(vn > kExhaustedTol * first_norm)) {
      if (truncate) break;
      fail(ErrorCode::DegenerateResponse,
           "pls: deflated response exhausted after " + std::to_string(l) + " components");
    }
    Vector w = v / vn;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (std::abs(w[k]) > 1e-12) {
        if (w[k] < 0) w = -w;
        break;
      }
    }
    const Vector t = Xl * w;
    const double tt = t.squaredNorm();
    if (!(tt > 0.0)) fail(ErrorCode::DegenerateResponse, "pls: zero score vector");
    const Vector p = Xl.transpose() * t / tt;
    const double cl = yl.dot(t) / tt;
    Xl.noalias() -= t * p.transpose();
    yl -= cl * t;
    W.col(l) = w;
    P.col(l) = p;
    T.col(l) = t;
    c[l] = cl;
    ++found;
  }

  out.weights = W.leftCols(found);
  out.loadings = P.leftCols(found);
  out.scores = T.leftCols(found);
  out.y_loadings = c.head(found);

  const Matrix PtW = out.loadings.transpose() * out.weights;
  Eigen::JacobiSVD<Matrix> svd(PtW);
  const Vector sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1]
                                            : std::numeric_limits<double>::infinity();
  if (!(cond < kMaxRotationCondition)) {
    std::ostringstream msg;
    msg << "pls: P^T W is singular (condition estimate " << cond << ")";
    throw ConditioningError(ErrorCode::SingularRotation, msg.str(), cond);
  }
  out.rotations = out.weights * PtW.inverse();
  return out;
}

}  // namespace

Vector PlsDecomposition::predict(const Matrix& X) const {
  require(X.cols() == x_mean.size(), "pls: predict dimension mismatch");
  const Vector coef = rotations * y_loadings;
  return ((X.rowwise() - x_mean.transpose()) * coef).array() + y_mean;
}

PlsDecomposition fit_pls(const Matrix& X, const Vector& y, std::size_t h) {
  return fit_impl(X, y, h, false);
}

PlsDecomposition fit_pls_truncating(const Matrix& X, const Vector& y, std::size_t h) {
  return fit_impl(X, y, h, true);
}

}  // namespace gekrig
