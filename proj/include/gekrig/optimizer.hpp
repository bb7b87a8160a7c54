#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "gekrig/types.hpp"

namespace gekrig {

/// Box of admissible hyperparameters. Searches run in log10 coordinates.
struct SearchSpace {
  Vector lower;
  Vector upper;

  static SearchSpace uniform(Eigen::Index dim, double lower = 1e-6, double upper = 1e2);
  Eigen::Index dim() const { return lower.size(); }
  void validate() const;
  bool contains(const Vector& theta) const;
};

struct OptResult {
  Vector theta;
  double objective = 0.0;
  std::size_t evals = 0;
  bool converged = false;
  /// Best-so-far objective after each evaluation of the winning start.
  std::vector<double> trace;
};

/// Objective to maximize. May throw; a throwing or non-finite evaluation is
/// treated as -infinity.
using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

struct DerivativeFreeOptions {
  std::size_t starts = 10;
  std::size_t budget_per_start = 0;  // 0 -> 30 * dim
  double first_start = 0.5;          // theta of the first start, every component
  double initial_step = 0.5;         // simplex edge in decades
  double xtol = 1e-4;                // simplex diameter in decades
  double ftol = 1e-10;
  std::uint64_t seed = 0;
  bool parallel_starts = true;
};

/// Multistart bounded Nelder-Mead in log10(theta). The first start is
/// theta = first_start, the rest come from a Latin hypercube in log space.
/// Best of starts wins; ties go to the lower start index. Throws
/// OptimizationFailed when every evaluation failed.
OptResult maximize_derivative_free(const Objective& f, const SearchSpace& space,
                                   const DerivativeFreeOptions& options = {});

struct GradientOptions {
  std::size_t budget = 200;  // objective evaluations
  double gtol = 1e-6;        // projected gradient inf-norm in log10 coordinates
  double max_step = 1.0;     // decades per iteration
};

/// Bounded quasi-Newton (projected BFGS with backtracking) ascent in log10
/// coordinates from theta0. Never returns a point worse than theta0. Throws
/// OptimizationFailed on a non-finite objective or gradient at theta0.
OptResult maximize_gradient_based(const Objective& f, const Gradient& grad, const Vector& theta0,
                                  const SearchSpace& space, const GradientOptions& options = {});

}  // namespace gekrig
