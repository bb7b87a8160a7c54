#include "gekrig/bounds.hpp"

#include <cmath>
#include <string>

#include "gekrig/errors.hpp"

namespace gekrig {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DegenerateResponse: return "degenerate-response";
    case ErrorCode::SingularRotation: return "singular-rotation";
    case ErrorCode::InvalidKernel: return "invalid-kernel";
    case ErrorCode::UnsupportedKernel: return "unsupported-kernel";
    case ErrorCode::IllConditioned: return "ill-conditioned";
    case ErrorCode::NumericalBreakdown: return "numerical-breakdown";
    case ErrorCode::OptimizationFailed: return "optimization-failed";
    case ErrorCode::TooLarge: return "too-large";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Bounds::Bounds(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() >= 1, "bounds: dimension must be at least 1");
  require(lower_.size() == upper_.size(), "bounds: lower/upper size mismatch");
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    require(std::isfinite(lower_[j]) && std::isfinite(upper_[j]), "bounds: non-finite entry");
    require(lower_[j] < upper_[j], "bounds: lower must be below upper in dimension " + std::to_string(j));
  }
}

Bounds Bounds::uniform(Eigen::Index d, double lo, double hi) {
  require(d >= 1, "bounds: dimension must be at least 1");
  return Bounds(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

bool Bounds::contains(const Vector& x, double rel_tol) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index j = 0; j < dim(); ++j) {
    const double slack = rel_tol * (upper_[j] - lower_[j]);
    if (!(x[j] >= lower_[j] - slack && x[j] <= upper_[j] + slack)) return false;
  }
  return true;
}

Matrix Bounds::to_unit_rows(const Matrix& points) const {
  require(points.cols() == dim(), "bounds: point dimension mismatch");
  // Same arithmetic as to_unit, so a point maps to identical bits either way.
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out.row(i) = (points.row(i).transpose() - lower_).cwiseQuotient(range()).transpose();
  return out;
}

Vector Bounds::to_unit(const Vector& x) const {
  require(x.size() == dim(), "bounds: point dimension mismatch");
  return (x - lower_).cwiseQuotient(range());
}

Matrix Bounds::from_unit_rows(const Matrix& unit_points) const {
  require(unit_points.cols() == dim(), "bounds: point dimension mismatch");
  return (unit_points * range().asDiagonal()).rowwise() + lower_.transpose();
}

}  // namespace gekrig
