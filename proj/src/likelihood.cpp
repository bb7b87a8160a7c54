#include "gekrig/likelihood.hpp"

#include <cmath>
#include <limits>

#include "gekrig/errors.hpp"

namespace gekrig {

MuSigma estimate_mu_sigma(const CorrelationMatrix& R, const Vector& ones, const Vector& y) {
  const Eigen::Index N = R.size();
  require(ones.size() == N && y.size() == N, "likelihood: vector sizes must match R");
  const auto L = R.chol.matrixL();
  const Vector u = L.solve(ones);
  const Vector z = L.solve(y);
  const double a = u.squaredNorm();
  if (!(a > 0.0) || !std::isfinite(a))
    fail(ErrorCode::NumericalBreakdown, "likelihood: 1^T R^-1 1 is not positive");
  MuSigma out;
  out.mu = u.dot(z) / a;
  out.sigma2 = (z - out.mu * u).squaredNorm() / static_cast<double>(N);
  const double scale = y.squaredNorm() / static_cast<double>(N);
  out.degenerate = !(out.sigma2 > 1e-20 * scale) || !(out.sigma2 > 0.0);
  return out;
}

LikelihoodProblem LikelihoodProblem::features(const Matrix& points, const Vector& y,
                                              const KernelSpec& kernel_template,
                                              const NuggetLadder& ladder) {
  require(points.rows() == y.size(), "likelihood: points and responses differ in length");
  require(points.cols() == kernel_template.input_dim(), "likelihood: kernel/point dimension mismatch");
  kernel_template.validate();
  LikelihoodProblem p;
  p.direct_ = false;
  p.template_ = kernel_template;
  p.points_ = points;
  p.y_ = y;
  p.ones_ = Vector::Ones(y.size());
  p.ladder_ = ladder;
  p.pairs_ = std::make_shared<const PairwiseFeatures>(points, kernel_template.feature_map());
  return p;
}

LikelihoodProblem LikelihoodProblem::direct_gek(const Matrix& points, const Vector& stacked_y, double nugget,
                                                DerivativeConvention convention, const NuggetLadder& ladder) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  require(stacked_y.size() == n * (d + 1), "likelihood: stacked response must have n(d+1) entries");
  LikelihoodProblem p;
  p.direct_ = true;
  p.template_ = KernelSpec::sq_exp(Vector::Ones(d), nugget);
  p.points_ = points;
  p.y_ = stacked_y;
  p.ones_ = Vector::Zero(n * (d + 1));
  p.ones_.head(n).setOnes();
  p.ladder_ = ladder;
  p.convention_ = convention;
  return p;
}

Eigen::Index LikelihoodProblem::num_hyperparameters() const { return template_.theta.size(); }

KernelSpec LikelihoodProblem::kernel(const Vector& theta) const {
  require(theta.size() == num_hyperparameters(), "likelihood: theta size mismatch");
  KernelSpec spec = template_;
  spec.theta = theta;
  spec.validate();
  return spec;
}

CorrelationMatrix LikelihoodProblem::correlation(const Vector& theta) const {
  const KernelSpec spec = kernel(theta);
  if (direct_) return assemble_R_direct_gek(spec, points_, convention_, ladder_);
  return factorize(pairs_->correlation(theta), spec.nugget, ladder_);
}

LikelihoodValue LikelihoodProblem::evaluate(const Vector& theta) const {
  const CorrelationMatrix R = correlation(theta);
  const MuSigma ms = estimate_mu_sigma(R, ones_, y_);
  LikelihoodValue out;
  out.mu = ms.mu;
  out.sigma2 = ms.sigma2;
  out.nugget_used = R.nugget_used;
  out.degenerate = ms.degenerate;
  if (ms.degenerate) {
    out.value = std::numeric_limits<double>::infinity();
  } else {
    const double N = static_cast<double>(y_.size());
    out.value = -0.5 * (N * std::log(ms.sigma2) + R.logdet);
  }
  return out;
}

Vector LikelihoodProblem::gradient(const Vector& theta) const {
  if (direct_) fail(ErrorCode::UnsupportedKernel, "likelihood: analytic gradient needs the feature layout");
  const CorrelationMatrix R = correlation(theta);
  const MuSigma ms = estimate_mu_sigma(R, ones_, y_);
  const Eigen::Index p = num_hyperparameters();
  if (ms.degenerate) return Vector::Constant(p, std::numeric_limits<double>::quiet_NaN());
  const Eigen::Index n = R.size();
  const Vector alpha = R.solve(y_ - ms.mu * ones_);
  const Matrix Rinv = R.chol.solve(Matrix::Identity(n, n));

  // d cll / d theta_q = -sum_{i<j} (a_i a_j / s2 - Rinv_ij) R_ij F_ij,q
  Vector coef(pairs_->num_pairs());
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      coef[pairs_->pair_index(i, j)] = (alpha[i] * alpha[j] / ms.sigma2 - Rinv(i, j)) * R.R(i, j);
  return -(pairs_->features().transpose() * coef);
}

}  // namespace gekrig
