#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gekrig/bounds.hpp"
#include "gekrig/types.hpp"

namespace gekrig {

enum class FunctionId { Y1, Y2, P1, P2, P3, P4, P5, P6, P7, P8 };

/// AsPrinted reproduces the published formulas verbatim; Corrected uses the
/// d_i^4 torsional stiffness in P8.
enum class FormulaMode { AsPrinted, Corrected };

/// Test function with bounds and gradient. Engineering problems take their
/// inputs in the order their range tables list them (left column top to
/// bottom, then right column), restricted to the variables the formula uses.
class BenchmarkFunction {
 public:
  using Eval = std::function<double(const Vector&)>;

  BenchmarkFunction(FunctionId id, std::string name, Bounds bounds, std::vector<std::string> variables,
                    Eval eval, std::function<Vector(const Vector&)> analytic_grad = {});

  FunctionId id() const { return id_; }
  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return bounds_.dim(); }
  const Bounds& bounds() const { return bounds_; }
  const std::vector<std::string>& variables() const { return variables_; }
  bool has_analytic_gradient() const { return static_cast<bool>(grad_); }

  /// Throws InvalidArgument outside the bounds (engineering problems).
  double operator()(const Vector& x) const;
  /// No bounds check.
  double eval_unchecked(const Vector& x) const { return eval_(x); }

  /// Analytic for y1/y2; otherwise central differences with step
  /// 1e-6 * max(|x_j|, range_j).
  Vector gradient(const Vector& x) const;
  Vector fd_gradient(const Vector& x, double relative_step = 1e-6) const;

  Vector evaluate(const Matrix& X) const;
  Matrix gradients(const Matrix& X) const;

 private:
  FunctionId id_;
  std::string name_;
  Bounds bounds_;
  std::vector<std::string> variables_;
  Eval eval_;
  std::function<Vector(const Vector&)> grad_;
  bool check_bounds_;
};

double eval_y1(const Vector& x);
Vector grad_y1(const Vector& x);
double eval_y2(const Vector& x);
Vector grad_y2(const Vector& x);

/// `d` is required for Y1/Y2 and must match the fixed dimension otherwise
/// (0 accepts it).
BenchmarkFunction make_function(FunctionId id, Eigen::Index d = 0,
                                FormulaMode mode = FormulaMode::AsPrinted);

/// Registry lookup: "y1:20", "y2:10", "p1" ... "p8".
BenchmarkFunction function_from_string(std::string_view key, FormulaMode mode = FormulaMode::AsPrinted);

/// ||y_true - y_hat||_2 / ||y_true||_2. InvalidArgument on zero-norm truth or
/// mismatched sizes.
double relative_error(const Vector& y_true, const Vector& y_hat);

}  // namespace gekrig
