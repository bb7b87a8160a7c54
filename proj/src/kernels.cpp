#include "gekrig/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gekrig/errors.hpp"

namespace gekrig {

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::SqExp: return "sqexp";
    case KernelKind::KplsSqExp: return "kpls_sqexp";
    case KernelKind::GeKplsSqExp: return "gekpls_sqexp";
  }
  return "unknown";
}

KernelSpec KernelSpec::sq_exp(Vector theta, double nugget) {
  KernelSpec spec;
  spec.kind = KernelKind::SqExp;
  spec.theta = std::move(theta);
  spec.nugget = nugget;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::kpls(Vector theta, Matrix rotations, double nugget) {
  KernelSpec spec;
  spec.kind = KernelKind::KplsSqExp;
  spec.theta = std::move(theta);
  spec.coefficients = std::move(rotations);
  spec.nugget = nugget;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::gekpls(Vector theta, Matrix averaged, double nugget) {
  KernelSpec spec;
  spec.kind = KernelKind::GeKplsSqExp;
  spec.theta = std::move(theta);
  spec.coefficients = std::move(averaged);
  spec.nugget = nugget;
  spec.validate();
  return spec;
}

Eigen::Index KernelSpec::input_dim() const {
  return kind == KernelKind::SqExp ? theta.size() : coefficients.rows();
}

Matrix KernelSpec::feature_map() const {
  if (kind == KernelKind::SqExp) return Matrix::Identity(theta.size(), theta.size());
  return coefficients.cwiseAbs2();
}

Vector KernelSpec::effective_weights() const {
  if (kind == KernelKind::SqExp) return theta;
  return coefficients.cwiseAbs2() * theta;
}

void KernelSpec::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidKernel, "kernel: " + what); };
  if (theta.size() == 0) bad("empty theta");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!std::isfinite(theta[i]) || !(theta[i] > 0.0)) bad("theta must be positive and finite");
  if (!std::isfinite(nugget) || nugget < 0.0) bad("nugget must be finite and nonnegative");
  if (kind == KernelKind::SqExp) {
    if (coefficients.size() != 0) bad("squared-exponential kernel takes no coefficients");
  } else {
    if (coefficients.cols() != theta.size() || coefficients.rows() == 0)
      bad("coefficient matrix must be d x h with h = theta size");
    if (!coefficients.allFinite()) bad("non-finite coefficient");
  }
}

namespace {

inline double floor_exp(double s) { return std::max(std::exp(-s), kCorrelationFloor); }

// Weighted squared distance with precomputed per-input weights.
inline double weighted_sq(const Vector& eta, const double* a, Eigen::Index sa, const double* b,
                          Eigen::Index sb) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < eta.size(); ++k) {
    const double diff = a[k * sa] - b[k * sb];
    s += eta[k] * diff * diff;
  }
  return s;
}

void check_points(const KernelSpec& spec, Eigen::Index cols) {
  require(cols == spec.input_dim(), "kernel: point dimension does not match the kernel");
}

}  // namespace

double correlate(const KernelSpec& spec, const Vector& x, const Vector& xp) {
  spec.validate();
  check_points(spec, x.size());
  require(xp.size() == x.size(), "kernel: argument sizes differ");
  double s = 0.0;
  if (spec.kind == KernelKind::SqExp) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double diff = x[i] - xp[i];
      s += spec.theta[i] * diff * diff;
    }
  } else {
    for (Eigen::Index l = 0; l < spec.theta.size(); ++l) {
      double sl = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double c = spec.coefficients(i, l);
        const double diff = c * x[i] - c * xp[i];
        sl += diff * diff;
      }
      s += spec.theta[l] * sl;
    }
  }
  return floor_exp(s);
}

GradBlocks correlate_grad_blocks(const KernelSpec& spec, const Vector& x, const Vector& xp,
                                 DerivativeConvention convention) {
  if (spec.kind != KernelKind::SqExp)
    fail(ErrorCode::UnsupportedKernel, "kernel: derivative blocks need the squared-exponential kernel");
  const double r = correlate(spec, x, xp);
  const Eigen::Index d = x.size();
  GradBlocks out;
  const Vector delta = x - xp;
  const Vector a = (2.0 * spec.theta.array() * delta.array()).matrix();  // 2 theta_k dx_k
  out.d_first = -a * r;
  out.d_second = a * r;
  out.d_cross = -(a * a.transpose()) * r;  // -4 theta_k theta_l dx_k dx_l r
  if (convention == DerivativeConvention::Analytic)
    for (Eigen::Index k = 0; k < d; ++k) out.d_cross(k, k) += 2.0 * spec.theta[k] * r;
  return out;
}

CorrelationMatrix factorize_fixed(Matrix R, double nugget) {
  CorrelationMatrix out;
  R.diagonal().array() += nugget;
  out.chol.compute(R);
  if (out.chol.info() != Eigen::Success)
    throw ConditioningError(ErrorCode::IllConditioned, "kernel: Cholesky factorization failed",
                            std::numeric_limits<double>::infinity());
  const auto L = out.chol.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    const double li = L(i, i);
    if (!(li > 0.0) || !std::isfinite(li))
      throw ConditioningError(ErrorCode::IllConditioned, "kernel: non-positive Cholesky pivot",
                              std::numeric_limits<double>::infinity());
    logdet += std::log(li);
  }
  out.logdet = 2.0 * logdet;
  out.nugget_used = nugget;
  out.R = std::move(R);
  return out;
}

CorrelationMatrix factorize(Matrix R, double initial_nugget, const NuggetLadder& ladder) {
  require(R.rows() == R.cols() && R.rows() >= 1, "kernel: correlation matrix must be square");
  double nugget = initial_nugget;
  while (true) {
    try {
      return factorize_fixed(R, nugget);
    } catch (const ConditioningError&) {
      if (nugget >= ladder.cap) break;
      nugget = nugget < ladder.start ? ladder.start : std::min(nugget * ladder.factor, ladder.cap);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(R, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  std::ostringstream msg;
  msg << "kernel: correlation matrix of size " << R.rows()
      << " is not positive definite at nugget " << ladder.cap << " (condition estimate " << cond
      << ")";
  throw ConditioningError(ErrorCode::IllConditioned, msg.str(), cond);
}

Matrix correlation_matrix(const KernelSpec& spec, const Matrix& points) {
  spec.validate();
  check_points(spec, points.cols());
  const Eigen::Index n = points.rows();
  const Vector eta = spec.effective_weights();
  Matrix R(n, n);
  const double* base = points.data();
  const Eigen::Index stride = points.outerStride();
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    R(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = floor_exp(weighted_sq(eta, base + i, stride, base + j, stride));
      R(i, j) = r;
      R(j, i) = r;
    }
  }
  return R;
}

Matrix correlation_matrix_serial(const KernelSpec& spec, const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix R(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      R(i, j) = correlate(spec, points.row(i).transpose(), points.row(j).transpose());
  return R;
}

CorrelationMatrix assemble_R(const KernelSpec& spec, const Matrix& points, const NuggetLadder& ladder) {
  require(points.rows() >= 1, "kernel: need at least one point");
  return factorize(correlation_matrix(spec, points), spec.nugget, ladder);
}

Matrix direct_gek_matrix(const KernelSpec& spec, const Matrix& points, DerivativeConvention convention) {
  if (spec.kind != KernelKind::SqExp)
    fail(ErrorCode::UnsupportedKernel, "kernel: direct GEK needs the squared-exponential kernel");
  spec.validate();
  check_points(spec, points.cols());
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Matrix R(n * (d + 1), n * (d + 1));
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = points.row(i).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector xj = points.row(j).transpose();
      const GradBlocks g = correlate_grad_blocks(spec, xi, xj, convention);
      R(i, j) = correlate(spec, xi, xj);
      for (Eigen::Index k = 0; k < d; ++k) {
        R(i, n + j * d + k) = g.d_second[k];
        R(n + i * d + k, j) = g.d_first[k];
      }
      R.block(n + i * d, n + j * d, d, d) = g.d_cross;
    }
  }
  return R;
}

CorrelationMatrix assemble_R_direct_gek(const KernelSpec& spec, const Matrix& points,
                                        DerivativeConvention convention, const NuggetLadder& ladder) {
  require(points.rows() >= 1, "kernel: need at least one point");
  return factorize(direct_gek_matrix(spec, points, convention), spec.nugget, ladder);
}

Vector correlate_vec(const KernelSpec& spec, const Vector& x, const Matrix& points) {
  spec.validate();
  check_points(spec, points.cols());
  require(x.size() == points.cols(), "kernel: point dimension mismatch");
  const Vector eta = spec.effective_weights();
  Vector r(points.rows());
  for (Eigen::Index j = 0; j < points.rows(); ++j)
    r[j] = floor_exp(weighted_sq(eta, x.data(), 1, points.data() + j, points.outerStride()));
  return r;
}

Vector correlate_vec_gek(const KernelSpec& spec, const Vector& x, const Matrix& points) {
  if (spec.kind != KernelKind::SqExp)
    fail(ErrorCode::UnsupportedKernel, "kernel: direct GEK needs the squared-exponential kernel");
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Vector out(n * (d + 1));
  out.head(n) = correlate_vec(spec, x, points);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      out[n + j * d + k] = 2.0 * spec.theta[k] * (x[k] - points(j, k)) * out[j];
  return out;
}

Matrix cross_correlation(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  spec.validate();
  check_points(spec, a.cols());
  check_points(spec, b.cols());
  const Vector eta = spec.effective_weights();
  Matrix out(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      out(i, j) = floor_exp(weighted_sq(eta, a.data() + i, a.outerStride(), b.data() + j, b.outerStride()));
  return out;
}

Matrix cross_correlation_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      out(i, j) = correlate(spec, a.row(i).transpose(), b.row(j).transpose());
  return out;
}

PairwiseFeatures::PairwiseFeatures(const Matrix& points, const Matrix& feature_map) : n_(points.rows()) {
  require(feature_map.rows() == points.cols(), "pairwise: feature map rows must equal the input dimension");
  const Eigen::Index d = points.cols();
  const Eigen::Index p = feature_map.cols();
  const bool identity = feature_map.isIdentity(0.0);
  features_.resize(n_ * (n_ - 1) / 2, p);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n_; ++i) {
    Eigen::RowVectorXd sq(d);
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      sq = (points.row(i) - points.row(j)).array().square();
      if (identity)
        features_.row(pair_index(i, j)) = sq;
      else
        features_.row(pair_index(i, j)).noalias() = sq * feature_map;
    }
  }
}

Eigen::Index PairwiseFeatures::pair_index(Eigen::Index i, Eigen::Index j) const {
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

Matrix PairwiseFeatures::correlation(const Vector& theta) const {
  require(theta.size() == features_.cols(), "pairwise: theta size mismatch");
  Matrix R(n_, n_);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n_; ++i) {
    R(i, i) = 1.0;
    const Eigen::Index count = n_ - i - 1;
    if (count == 0) continue;
    const Eigen::Index start = pair_index(i, i + 1);
    const Vector s = features_.middleRows(start, count) * theta;
    for (Eigen::Index k = 0; k < count; ++k) {
      const double r = floor_exp(s[k]);
      R(i, i + 1 + k) = r;
      R(i + 1 + k, i) = r;
    }
  }
  return R;
}

Matrix PairwiseFeatures::correlation_serial(const Vector& theta) const {
  require(theta.size() == features_.cols(), "pairwise: theta size mismatch");
  Matrix R = Matrix::Identity(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      double s = 0.0;
      const Eigen::Index row = pair_index(i, j);
      for (Eigen::Index q = 0; q < features_.cols(); ++q) s += features_(row, q) * theta[q];
      R(i, j) = R(j, i) = floor_exp(s);
    }
  }
  return R;
}

}  // namespace gekrig
