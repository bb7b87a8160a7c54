#pragma once

#include "gekrig/types.hpp"

namespace gekrig {

/// Axis-aligned box [lower, upper] in R^d.
class Bounds {
 public:
  Bounds(Vector lower, Vector upper);

  /// [lo, hi]^d
  static Bounds uniform(Eigen::Index d, double lo, double hi);

  Eigen::Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector range() const { return upper_ - lower_; }

  bool contains(const Vector& x, double rel_tol = 0.0) const;

  /// Map physical coordinates to the unit cube, row by row.
  Matrix to_unit_rows(const Matrix& points) const;
  Vector to_unit(const Vector& x) const;
  Matrix from_unit_rows(const Matrix& unit_points) const;

 private:
  Vector lower_;
  Vector upper_;
};

}  // namespace gekrig
