#pragma once

#include <limits>
#include <memory>

#include "gekrig/kernels.hpp"
#include "gekrig/types.hpp"

namespace gekrig {

struct MuSigma {
  double mu = 0.0;
  double sigma2 = 0.0;
  bool degenerate = false;  // sigma2 numerically zero
};

/// Generalized-least-squares trend and process variance through the Cholesky
/// factor of R. Throws NumericalBreakdown when 1^T R^-1 1 <= 0.
MuSigma estimate_mu_sigma(const CorrelationMatrix& R, const Vector& ones, const Vector& y);

struct LikelihoodValue {
  /// -0.5 (N ln sigma2 + ln det R). +infinity when `degenerate`.
  double value = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double nugget_used = 0.0;
  bool degenerate = false;
};

/// Concentrated log-likelihood of a training set as a function of theta.
///
/// Two layouts are supported. The feature layout covers every kernel whose
/// correlation is exp(-features . theta) (SqExp, KPLS, GE-KPLS) and supports
/// the analytic gradient. The direct-GEK layout stacks values and gradients.
/// Instances are immutable and safe to evaluate from several threads.
class LikelihoodProblem {
 public:
  /// `points` in kernel coordinates; `feature_map` is d x p (see
  /// KernelSpec::feature_map) and fixes the kernel family.
  static LikelihoodProblem features(const Matrix& points, const Vector& y,
                                    const KernelSpec& kernel_template,
                                    const NuggetLadder& ladder = {});

  /// `stacked_y` is [values; gradients grouped per sample], gradients in kernel
  /// coordinates.
  static LikelihoodProblem direct_gek(const Matrix& points, const Vector& stacked_y,
                                      double nugget, DerivativeConvention convention,
                                      const NuggetLadder& ladder = {});

  Eigen::Index num_hyperparameters() const;
  Eigen::Index system_size() const { return y_.size(); }
  const Vector& responses() const { return y_; }
  const Vector& ones() const { return ones_; }
  bool is_direct_gek() const { return direct_; }

  /// Kernel with `theta` substituted.
  KernelSpec kernel(const Vector& theta) const;

  CorrelationMatrix correlation(const Vector& theta) const;

  LikelihoodValue evaluate(const Vector& theta) const;
  double concentrated_ll(const Vector& theta) const { return evaluate(theta).value; }

  /// d cll / d theta. Feature layout only (UnsupportedKernel otherwise).
  Vector gradient(const Vector& theta) const;

 private:
  LikelihoodProblem() = default;

  bool direct_ = false;
  KernelSpec template_;
  Matrix points_;
  Vector y_;
  Vector ones_;
  NuggetLadder ladder_;
  DerivativeConvention convention_ = DerivativeConvention::Analytic;
  std::shared_ptr<const PairwiseFeatures> pairs_;
};

}  // namespace gekrig
