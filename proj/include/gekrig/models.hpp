#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gekrig/bounds.hpp"
#include "gekrig/kernels.hpp"
#include "gekrig/optimizer.hpp"
#include "gekrig/types.hpp"

namespace gekrig {

enum class ModelKind { Kriging, Kpls, Kplsk, GekIndirect, GekDirect, GeKpls };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);
bool uses_gradients(ModelKind kind);

/// Samples, responses, optional gradients (physical units) and the domain.
struct TrainingData {
  Matrix X;
  Vector y;
  std::optional<Matrix> dY;
  Bounds bounds;

  TrainingData(Matrix X, Vector y, Bounds bounds);
  TrainingData(Matrix X, Vector y, Matrix dY, Bounds bounds);

  Eigen::Index samples() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }

  /// Shapes, finiteness, distinct rows, gradient presence.
  void validate(bool needs_gradients) const;
};

struct GeKplsConfig {
  std::size_t h = 1;          // PLS components, also the number of hyperparameters
  std::size_t m = 1;          // extra FOTA points per sample, 1 <= m <= d
  double fota_step = 1e-4;    // fraction of each input range

  void validate(Eigen::Index d) const;
};

struct FitOptions {
  std::size_t h = 3;  // KPLS / KPLSK components
  GeKplsConfig gekpls;
  double fota_step = 1e-4;  // indirect GEK
  double theta_lower = 1e-6;
  double theta_upper = 1e2;
  DerivativeFreeOptions search;
  GradientOptions refine;
  /// Nugget tried first; the ladder only takes over when Cholesky fails.
  double nugget = 1e-10;
  /// First nugget for systems holding FOTA points (indirect GEK, GE-KPLS).
  /// Their correlation with the parent sample differs from 1 by about
  /// theta * step^2, which a 1e-10 nugget would swamp at the default step.
  double fota_nugget = kMachineNugget;
  NuggetLadder ladder;
  std::size_t row_cap = 3000;
  DerivativeConvention convention = DerivativeConvention::Analytic;
};

struct FitMeta {
  std::size_t h = 0;
  std::size_t m = 0;
  double fota_step = 0.0;
  double nugget_used = 0.0;
  double fit_seconds = 0.0;
  double cll = 0.0;
  /// KPLSK only: cll of the stage-one solution mapped to d-space (eta).
  double stage1_cll = std::numeric_limits<double>::quiet_NaN();
  std::size_t evals = 0;
};

/// Immutable trained state. Training points are stored in unit-cube
/// coordinates, responses in the layout the kernel expects.
class FittedSurrogate {
 public:
  /// Factorizes R (nugget ladder starting at spec.nugget) and computes mu, sigma2 and the
  /// predictor weights. Used by every fit routine and by deserialization so
  /// that both paths produce the same state.
  static FittedSurrogate assemble(ModelKind kind, KernelSpec spec, Bounds bounds, Matrix unit_points,
                                  Vector responses, DerivativeConvention convention, FitMeta meta);

  ModelKind kind() const { return kind_; }
  const KernelSpec& kernel() const { return spec_; }
  const Vector& theta() const { return spec_.theta; }
  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  const Bounds& bounds() const { return bounds_; }
  const Matrix& unit_points() const { return points_; }
  /// Training points in physical coordinates (including FOTA extras).
  Matrix training_points() const;
  const Vector& responses() const { return responses_; }
  const Vector& alpha() const { return alpha_; }
  const FitMeta& meta() const { return meta_; }
  DerivativeConvention convention() const { return convention_; }

  double predict(const Vector& x) const;
  /// One prediction per row (OpenMP over rows).
  Vector predict(const Matrix& X) const;
  Vector predict_serial(const Matrix& X) const;

  /// Ordinary-kriging variance
  /// sigma2 (1 + nugget - r^T R^-1 r + (1 - F^T R^-1 r)^2 / (F^T R^-1 F)), clamped at 0.
  double predict_variance(const Vector& x) const;

 private:
  FittedSurrogate(ModelKind kind, KernelSpec spec, Bounds bounds, Matrix points, Vector responses,
                  Vector ones, CorrelationMatrix R, DerivativeConvention convention, FitMeta meta);

  Vector correlation_with(const Vector& unit_x) const;

  ModelKind kind_;
  KernelSpec spec_;
  Bounds bounds_;
  Matrix points_;
  Vector responses_;
  Vector ones_;
  CorrelationMatrix R_;
  Vector alpha_;
  double mu_ = 0.0;
  double sigma2_ = 0.0;
  DerivativeConvention convention_;
  FitMeta meta_;
};

/// y + g . offset. `offset` holds physical steps.
double fota_extrapolate(double y, const Vector& gradient, const Vector& offset);

/// Indices of the m largest magnitudes, ties broken by ascending index.
std::vector<Eigen::Index> top_m_directions(const Vector& magnitudes, std::size_t m);

/// Result of the per-sample local PLS pass of GE-KPLS.
struct LocalInfluence {
  Matrix averaged;  // d x h, mean of |w*| over samples
  std::vector<std::vector<Eigen::Index>> selected;  // per sample, m directions
  std::size_t degenerate_samples = 0;  // samples whose local cloud had no slope
};

/// Builds each sample's FOTA cloud on displacement_set(d), fits a local PLS
/// and records |w*| and the top-m directions of the first component
/// (OpenMP over samples).
LocalInfluence local_influence(const TrainingData& data, const GeKplsConfig& config);
LocalInfluence local_influence_serial(const TrainingData& data, const GeKplsConfig& config);

/// Samples followed by one forward FOTA point per (sample, direction), in
/// physical coordinates.
struct AugmentedSet {
  Matrix X;
  Vector y;
};
AugmentedSet fota_augment(const TrainingData& data,
                          const std::vector<std::vector<Eigen::Index>>& directions, double fota_step);

FittedSurrogate fit_kriging(const TrainingData& data, const FitOptions& options = {});
FittedSurrogate fit_kpls(const TrainingData& data, const FitOptions& options = {});
FittedSurrogate fit_kplsk(const TrainingData& data, const FitOptions& options = {});
FittedSurrogate fit_gek_indirect(const TrainingData& data, const FitOptions& options = {});
FittedSurrogate fit_gek_direct(const TrainingData& data, const FitOptions& options = {});
FittedSurrogate fit_gekpls(const TrainingData& data, const FitOptions& options = {});

FittedSurrogate fit(ModelKind kind, const TrainingData& data, const FitOptions& options = {});

}  // namespace gekrig
