#pragma once

#include <cstddef>
#include <limits>

#include "gekrig/types.hpp"

namespace gekrig {

enum class KernelKind {
  SqExp,        // prod_i exp(-theta_i (x_i - x'_i)^2)
  KplsSqExp,    // prod_l prod_i exp(-theta_l (w*_il x_i - w*_il x'_i)^2)
  GeKplsSqExp,  // same form with the averaged local coefficients |w*| in place of w*
};

const char* to_string(KernelKind kind);

/// Gaussian correlation function and its hyperparameters.
///
/// `coefficients` is empty for SqExp and d x h for the projected variants;
/// `theta` has d entries for SqExp and h entries otherwise.
struct KernelSpec {
  KernelKind kind = KernelKind::SqExp;
  Vector theta;
  Matrix coefficients;
  double nugget = 0.0;

  static KernelSpec sq_exp(Vector theta, double nugget = 0.0);
  static KernelSpec kpls(Vector theta, Matrix rotations, double nugget = 0.0);
  static KernelSpec gekpls(Vector theta, Matrix averaged, double nugget = 0.0);

  Eigen::Index input_dim() const;

  /// Per-input weights eta with r = prod_i exp(-eta_i (x_i - x'_i)^2).
  /// For the projected kernels eta_i = sum_l theta_l c_il^2.
  Vector effective_weights() const;

  /// d x p matrix M such that eta = M theta.
  Matrix feature_map() const;

  /// Throws InvalidKernel on non-positive or non-finite theta, non-finite
  /// coefficients, negative nugget or a shape mismatch.
  void validate() const;
};

inline constexpr double kCorrelationFloor = 1e-300;

/// r(x, x') in (0, 1]. Projected kernels are evaluated in their product form.
double correlate(const KernelSpec& spec, const Vector& x, const Vector& xp);

/// How the gradient-gradient block is formed for direct GEK.
enum class DerivativeConvention {
  /// True mixed derivative r (2 theta_k delta_kl - 4 theta_k theta_l dx_k dx_l).
  Analytic,
  /// The expression without the 2 theta_k delta_kl r term.
  StrictPaperBlocks,
};

struct GradBlocks {
  Vector d_first;   // dr/dx_k
  Vector d_second;  // dr/dx'_k
  Matrix d_cross;   // d^2 r / dx_k dx'_l
};

/// Derivative blocks of the SqExp correlation; UnsupportedKernel otherwise.
GradBlocks correlate_grad_blocks(const KernelSpec& spec, const Vector& x, const Vector& xp,
                                 DerivativeConvention convention = DerivativeConvention::Analytic);

/// 100 machine epsilons: keeps R positive definite in floating point without
/// swamping the correlation gap of closely spaced FOTA points.
inline constexpr double kMachineNugget = 100.0 * std::numeric_limits<double>::epsilon();

/// Starting nugget, growth factor and cap used when a Cholesky factorization
/// fails. Nuggets below `start` jump straight to it.
struct NuggetLadder {
  double start = 1e-10;
  double factor = 100.0;
  double cap = 1e-4;
};

/// A factorized correlation matrix. `R` already includes the nugget.
struct CorrelationMatrix {
  Matrix R;
  Eigen::LLT<Matrix> chol;
  double logdet = 0.0;
  double nugget_used = 0.0;

  Eigen::Index size() const { return R.rows(); }
  Vector solve(const Vector& b) const { return chol.solve(b); }
};

/// Adds `initial_nugget` to the diagonal of `R` and factorizes. On failure the
/// nugget climbs the ladder (a zero start jumps to ladder.start). Throws a
/// ConditioningError with code IllConditioned once the cap fails too.
CorrelationMatrix factorize(Matrix R, double initial_nugget, const NuggetLadder& ladder = {});

/// Factorizes with exactly `nugget`, without escalation.
CorrelationMatrix factorize_fixed(Matrix R, double nugget);

/// Correlation matrix of the rows of `points` (OpenMP over rows).
CorrelationMatrix assemble_R(const KernelSpec& spec, const Matrix& points,
                             const NuggetLadder& ladder = {});

/// Unfactorized correlation matrix, OpenMP over rows, no nugget.
Matrix correlation_matrix(const KernelSpec& spec, const Matrix& points);
/// Reference for correlation_matrix: plain double loop over correlate().
Matrix correlation_matrix_serial(const KernelSpec& spec, const Matrix& points);

/// Block correlation matrix of size n(d+1): value-value, value-gradient,
/// gradient-value and gradient-gradient blocks. Gradient rows are grouped per
/// sample: row n + i*d + k is dy(x_i)/dx_k.
Matrix direct_gek_matrix(const KernelSpec& spec, const Matrix& points,
                         DerivativeConvention convention = DerivativeConvention::Analytic);

CorrelationMatrix assemble_R_direct_gek(const KernelSpec& spec, const Matrix& points,
                                        DerivativeConvention convention = DerivativeConvention::Analytic,
                                        const NuggetLadder& ladder = {});

/// r(x, points_j) for every row j.
Vector correlate_vec(const KernelSpec& spec, const Vector& x, const Matrix& points);

/// Correlation of y(x) with every value and gradient observation in the
/// direct-GEK layout (length n(d+1)).
Vector correlate_vec_gek(const KernelSpec& spec, const Vector& x, const Matrix& points);

/// Cross-correlation block between rows of `a` and rows of `b` (OpenMP over rows of `a`).
Matrix cross_correlation(const KernelSpec& spec, const Matrix& a, const Matrix& b);
Matrix cross_correlation_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b);

/// Squared coordinate differences of every unordered pair of rows, projected
/// through a feature map, so that R_ij = exp(-features_ij . theta). Built once
/// per training set and reused by every likelihood evaluation.
class PairwiseFeatures {
 public:
  PairwiseFeatures(const Matrix& points, const Matrix& feature_map);

  Eigen::Index points() const { return n_; }
  Eigen::Index num_features() const { return features_.cols(); }
  Eigen::Index num_pairs() const { return features_.rows(); }

  /// Row of pair (i, j), i < j.
  Eigen::Index pair_index(Eigen::Index i, Eigen::Index j) const;
  const Matrix& features() const { return features_; }

  /// Unit-diagonal correlation matrix for `theta` (OpenMP over pairs).
  Matrix correlation(const Vector& theta) const;
  Matrix correlation_serial(const Vector& theta) const;

 private:
  Eigen::Index n_;
  Matrix features_;  // pairs x p
};

}  // namespace gekrig
