#include "gekrig/models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gekrig/doe.hpp"
#include "gekrig/errors.hpp"
#include "gekrig/likelihood.hpp"
#include "gekrig/pls.hpp"

namespace gekrig {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Kriging: return "kriging";
    case ModelKind::Kpls: return "kpls";
    case ModelKind::Kplsk: return "kplsk";
    case ModelKind::GekIndirect: return "gek_indirect";
    case ModelKind::GekDirect: return "gek_direct";
    case ModelKind::GeKpls: return "gekpls";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k : {ModelKind::Kriging, ModelKind::Kpls, ModelKind::Kplsk, ModelKind::GekIndirect,
                      ModelKind::GekDirect, ModelKind::GeKpls})
    if (name == to_string(k)) return k;
  if (name == "gek") return ModelKind::GekIndirect;
  if (name == "ge-kpls" || name == "ge_kpls") return ModelKind::GeKpls;
  fail(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

bool uses_gradients(ModelKind kind) {
  return kind == ModelKind::GekIndirect || kind == ModelKind::GekDirect || kind == ModelKind::GeKpls;
}

TrainingData::TrainingData(Matrix X_, Vector y_, Bounds bounds_)
    : X(std::move(X_)), y(std::move(y_)), bounds(std::move(bounds_)) {}

TrainingData::TrainingData(Matrix X_, Vector y_, Matrix dY_, Bounds bounds_)
    : X(std::move(X_)), y(std::move(y_)), dY(std::move(dY_)), bounds(std::move(bounds_)) {}

void TrainingData::validate(bool needs_gradients) const {
  require(X.rows() >= 2, "training data: need at least 2 samples");
  require(X.rows() == y.size(), "training data: X and y row counts differ");
  require(X.cols() == bounds.dim(), "training data: X columns do not match the bounds");
  require(X.allFinite() && y.allFinite(), "training data: non-finite sample or response");
  if (needs_gradients) require(dY.has_value(), "training data: this model needs gradients");
  if (dY) {
    require(dY->rows() == X.rows() && dY->cols() == X.cols(), "training data: gradient matrix must be n x d");
    require(dY->allFinite(), "training data: non-finite gradient");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < X.cols(); ++k)
      if (X(a, k) != X(b, k)) return X(a, k) < X(b, k);
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i)
    require(row_less(order[i - 1], order[i]), "training data: duplicate sample rows");
}

void GeKplsConfig::validate(Eigen::Index d) const {
  require(h >= 1, "gekpls: h must be at least 1");
  require(static_cast<Eigen::Index>(h) <= d, "gekpls: h must not exceed d");
  require(m >= 1 && static_cast<Eigen::Index>(m) <= d, "gekpls: m must lie in [1, d]");
  require(fota_step > 0.0 && fota_step < 0.1, "gekpls: fota step must lie in (0, 0.1)");
}

// ---------------------------------------------------------------------------
// FittedSurrogate

FittedSurrogate::FittedSurrogate(ModelKind kind, KernelSpec spec, Bounds bounds, Matrix points, Vector responses,
                                 Vector ones, CorrelationMatrix R, DerivativeConvention convention, FitMeta meta)
    : kind_(kind),
      spec_(std::move(spec)),
      bounds_(std::move(bounds)),
      points_(std::move(points)),
      responses_(std::move(responses)),
      ones_(std::move(ones)),
      R_(std::move(R)),
      convention_(convention),
      meta_(meta) {
  const MuSigma ms = estimate_mu_sigma(R_, ones_, responses_);
  mu_ = ms.mu;
  sigma2_ = ms.sigma2;
  alpha_ = R_.solve(responses_ - mu_ * ones_);
  meta_.nugget_used = R_.nugget_used;
}

FittedSurrogate FittedSurrogate::assemble(ModelKind kind, KernelSpec spec, Bounds bounds, Matrix unit_points,
                                          Vector responses, DerivativeConvention convention, FitMeta meta) {
  spec.validate();
  require(unit_points.cols() == bounds.dim(), "model: point dimension does not match the bounds");
  const Eigen::Index n = unit_points.rows();
  Vector ones;
  CorrelationMatrix R;
  if (kind == ModelKind::GekDirect) {
    const Eigen::Index d = unit_points.cols();
    require(responses.size() == n * (d + 1), "model: direct GEK needs n(d+1) stacked responses");
    ones = Vector::Zero(n * (d + 1));
    ones.head(n).setOnes();
    R = factorize(direct_gek_matrix(spec, unit_points, convention), spec.nugget);
  } else {
    require(responses.size() == n, "model: one response per training point");
    ones = Vector::Ones(n);
    R = factorize(correlation_matrix(spec, unit_points), spec.nugget);
  }
  spec.nugget = R.nugget_used;
  return FittedSurrogate(kind, std::move(spec), std::move(bounds), std::move(unit_points), std::move(responses),
                         std::move(ones), std::move(R), convention, meta);
}

Matrix FittedSurrogate::training_points() const { return bounds_.from_unit_rows(points_); }

// The nugget belongs to the kernel at zero distance, so a training point sees
// the same row the factorized matrix holds and is reproduced exactly.
Vector FittedSurrogate::correlation_with(const Vector& unit_x) const {
  Vector r = kind_ == ModelKind::GekDirect ? correlate_vec_gek(spec_, unit_x, points_)
                                           : correlate_vec(spec_, unit_x, points_);
  for (Eigen::Index i = 0; i < points_.rows(); ++i)
    if (r[i] == 1.0 && points_.row(i) == unit_x.transpose()) r[i] += spec_.nugget;
  return r;
}

double FittedSurrogate::predict(const Vector& x) const {
  require(x.size() == bounds_.dim() && x.allFinite(), "predict: bad input point");
  return mu_ + correlation_with(bounds_.to_unit(x)).dot(alpha_);
}

Vector FittedSurrogate::predict(const Matrix& X) const {
  require(X.cols() == bounds_.dim(), "predict: dimension mismatch");
  Vector out(X.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(Vector(X.row(i).transpose()));
  return out;
}

Vector FittedSurrogate::predict_serial(const Matrix& X) const {
  require(X.cols() == bounds_.dim(), "predict: dimension mismatch");
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(Vector(X.row(i).transpose()));
  return out;
}

double FittedSurrogate::predict_variance(const Vector& x) const {
  require(x.size() == bounds_.dim() && x.allFinite(), "predict_variance: bad input point");
  const Vector r = correlation_with(bounds_.to_unit(x));
  const Vector v = R_.solve(r);
  const Vector Rinv_F = R_.solve(ones_);
  const double a = ones_.dot(Rinv_F);
  const double b = 1.0 - ones_.dot(v);
  const double s2 = sigma2_ * (1.0 + spec_.nugget - r.dot(v) + b * b / a);
  return std::max(s2, 0.0);
}

// ---------------------------------------------------------------------------
// FOTA helpers

double fota_extrapolate(double y, const Vector& gradient, const Vector& offset) {
  require(gradient.size() == offset.size(), "fota: gradient and offset sizes differ");
  return y + gradient.dot(offset);
}

std::vector<Eigen::Index> top_m_directions(const Vector& magnitudes, std::size_t m) {
  require(static_cast<Eigen::Index>(m) <= magnitudes.size(), "top_m: m exceeds the number of directions");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(magnitudes.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(magnitudes[a]) > std::abs(magnitudes[b]);
  });
  idx.resize(m);
  return idx;
}

AugmentedSet fota_augment(const TrainingData& data, const std::vector<std::vector<Eigen::Index>>& directions,
                          double fota_step) {
  require(data.dY.has_value(), "fota: gradients required");
  require(static_cast<Eigen::Index>(directions.size()) == data.samples(), "fota: one direction list per sample");
  const Eigen::Index n = data.samples();
  const Eigen::Index d = data.dim();
  const Vector step = fota_step * data.bounds.range();
  std::size_t extra = 0;
  for (const auto& dirs : directions) extra += dirs.size();
  AugmentedSet out;
  out.X.resize(n + static_cast<Eigen::Index>(extra), d);
  out.y.resize(out.X.rows());
  out.X.topRows(n) = data.X;
  out.y.head(n) = data.y;
  Eigen::Index row = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const Eigen::Index j : directions[static_cast<std::size_t>(i)]) {
      require(j >= 0 && j < d, "fota: direction index out of range");
      Vector offset = Vector::Zero(d);
      offset[j] = step[j];
      out.X.row(row) = data.X.row(i) + offset.transpose();
      out.y[row] = fota_extrapolate(data.y[i], data.dY->row(i).transpose(), offset);
      ++row;
    }
  }
  return out;
}

namespace {

struct LocalResult {
  Matrix abs_rotations;  // d x h, zero columns past the components found
  std::vector<Eigen::Index> selected;
  bool degenerate = false;
};

LocalResult local_pls(const TrainingData& data, const GeKplsConfig& config, const Matrix& offsets, Eigen::Index i) {
  const Eigen::Index d = data.dim();
  const Eigen::Index h = static_cast<Eigen::Index>(config.h);
  const Vector step = config.fota_step * data.bounds.range();
  const Vector x = data.X.row(i).transpose();
  const Vector g = data.dY->row(i).transpose();
  const Vector u = data.bounds.to_unit(x);

  const Eigen::Index K = offsets.rows();
  Matrix cloud(K + 1, d);
  Vector resp(K + 1);
  cloud.row(0) = u.transpose();
  resp[0] = data.y[i];
  for (Eigen::Index k = 0; k < K; ++k) {
    cloud.row(k + 1) = u.transpose() + config.fota_step * offsets.row(k);
    const Vector physical = offsets.row(k).transpose().cwiseProduct(step);
    resp[k + 1] = fota_extrapolate(data.y[i], g, physical);
  }

  LocalResult out;
  out.abs_rotations = Matrix::Zero(d, h);
  try {
    const PlsDecomposition pls = fit_pls_truncating(cloud, resp, config.h);
    out.abs_rotations.leftCols(pls.components()) = pls.rotations.cwiseAbs();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateResponse) throw;
    out.degenerate = true;
  }
  out.selected = top_m_directions(out.abs_rotations.col(0), config.m);
  return out;
}

LocalInfluence combine(const TrainingData& data, const GeKplsConfig& config, std::vector<LocalResult>& local) {
  LocalInfluence out;
  out.averaged = Matrix::Zero(data.dim(), static_cast<Eigen::Index>(config.h));
  std::size_t used = 0;
  for (auto& r : local) {
    if (r.degenerate) {
      ++out.degenerate_samples;
    } else {
      out.averaged += r.abs_rotations;
      ++used;
    }
    out.selected.push_back(std::move(r.selected));
  }
  if (used == 0) fail(ErrorCode::DegenerateResponse, "gekpls: every local FOTA cloud is flat");
  out.averaged /= static_cast<double>(used);
  return out;
}

void check_local_args(const TrainingData& data, const GeKplsConfig& config) {
  data.validate(true);
  config.validate(data.dim());
}

}  // namespace

LocalInfluence local_influence(const TrainingData& data, const GeKplsConfig& config) {
  check_local_args(data, config);
  const Matrix offsets = displacement_set(data.dim()).offsets;
  std::vector<LocalResult> local(static_cast<std::size_t>(data.samples()));
  bool failed = false;
  std::string error;
  ErrorCode code = ErrorCode::InvalidArgument;
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index i = 0; i < data.samples(); ++i) {
    try {
      local[static_cast<std::size_t>(i)] = local_pls(data, config, offsets, i);
    } catch (const Error& e) {
#pragma omp critical(gekrig_local_influence)
      {
        failed = true;
        code = e.code();
        error = e.what();
      }
    }
  }
  if (failed) fail(code, error);
  return combine(data, config, local);
}

LocalInfluence local_influence_serial(const TrainingData& data, const GeKplsConfig& config) {
  check_local_args(data, config);
  const Matrix offsets = displacement_set(data.dim()).offsets;
  std::vector<LocalResult> local;
  for (Eigen::Index i = 0; i < data.samples(); ++i) local.push_back(local_pls(data, config, offsets, i));
  return combine(data, config, local);
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::max(std::chrono::duration<double>(Clock::now() - start).count(), 1e-9);
}

void check_response_variance(const Vector& y) {
  const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  if ((y.array() - y.mean()).abs().maxCoeff() <= 1e-13 * scale)
    fail(ErrorCode::DegenerateResponse, "fit: responses are constant");
}

Objective cll_objective(const LikelihoodProblem& problem) {
  return [&problem](const Vector& theta) {
    const LikelihoodValue v = problem.evaluate(theta);
    return v.degenerate ? -std::numeric_limits<double>::infinity() : v.value;
  };
}

struct SearchOutcome {
  Vector theta;
  double cll = 0.0;
  std::size_t evals = 0;
};

SearchOutcome search_theta(const LikelihoodProblem& problem, const FitOptions& options) {
  const SearchSpace space =
      SearchSpace::uniform(problem.num_hyperparameters(), options.theta_lower, options.theta_upper);
  const OptResult res = maximize_derivative_free(cll_objective(problem), space, options.search);
  return {res.theta, res.objective, res.evals};
}

FittedSurrogate finish(ModelKind kind, const LikelihoodProblem& problem, const SearchOutcome& found,
                       const Bounds& bounds, const Matrix& unit_points, const Vector& responses,
                       const FitOptions& options, FitMeta meta, Clock::time_point start) {
  KernelSpec spec = problem.kernel(found.theta);
  spec.nugget = problem.evaluate(found.theta).nugget_used;
  meta.cll = found.cll;
  meta.evals = found.evals;
  meta.fit_seconds = seconds_since(start);
  return FittedSurrogate::assemble(kind, std::move(spec), bounds, unit_points, responses, options.convention, meta);
}

FittedSurrogate fit_sqexp(ModelKind kind, const Bounds& bounds, const Matrix& X, const Vector& y,
                          const FitOptions& options, FitMeta meta, Clock::time_point start) {
  check_response_variance(y);
  const Matrix U = bounds.to_unit_rows(X);
  const auto problem = LikelihoodProblem::features(
      U, y, KernelSpec::sq_exp(Vector::Ones(bounds.dim()), options.nugget), options.ladder);
  const SearchOutcome found = search_theta(problem, options);
  return finish(kind, problem, found, bounds, U, y, options, meta, start);
}

void check_kpls_h(const TrainingData& data, std::size_t h) {
  require(h >= 1 && static_cast<Eigen::Index>(h) <= std::min(data.samples() - 1, data.dim()),
          "kpls: h must lie in [1, min(n-1, d)]");
}

}  // namespace

FittedSurrogate fit_kriging(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  data.validate(false);
  return fit_sqexp(ModelKind::Kriging, data.bounds, data.X, data.y, options, FitMeta{}, start);
}

FittedSurrogate fit_kpls(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  data.validate(false);
  check_kpls_h(data, options.h);
  check_response_variance(data.y);
  const Matrix U = data.bounds.to_unit_rows(data.X);
  const PlsDecomposition pls = fit_pls(U, data.y, options.h);
  const auto problem = LikelihoodProblem::features(
      U, data.y, KernelSpec::kpls(Vector::Ones(pls.components()), pls.rotations, options.nugget), options.ladder);
  const SearchOutcome found = search_theta(problem, options);
  FitMeta meta;
  meta.h = options.h;
  return finish(ModelKind::Kpls, problem, found, data.bounds, U, data.y, options, meta, start);
}

FittedSurrogate fit_kplsk(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  data.validate(false);
  check_kpls_h(data, options.h);
  check_response_variance(data.y);
  const Eigen::Index d = data.dim();
  const Matrix U = data.bounds.to_unit_rows(data.X);
  const PlsDecomposition pls = fit_pls(U, data.y, options.h);
  const auto reduced = LikelihoodProblem::features(
      U, data.y, KernelSpec::kpls(Vector::Ones(pls.components()), pls.rotations, options.nugget), options.ladder);
  const SearchOutcome stage1 = search_theta(reduced, options);

  // Change of variables into d-space, then local gradient-based refinement.
  const SearchSpace space = SearchSpace::uniform(d, options.theta_lower, options.theta_upper);
  const Vector eta =
      reduced.kernel(stage1.theta).effective_weights().cwiseMax(space.lower).cwiseMin(space.upper);
  const auto full = LikelihoodProblem::features(U, data.y, KernelSpec::sq_exp(Vector::Ones(d), options.nugget),
                                                options.ladder);
  const Objective f = cll_objective(full);
  const Gradient g = [&full](const Vector& theta) { return full.gradient(theta); };
  const double stage1_cll = f(eta);
  OptResult refined;
  try {
    refined = maximize_gradient_based(f, g, eta, space, options.refine);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OptimizationFailed) throw;
    refined.theta = eta;
    refined.objective = stage1_cll;
  }
  FitMeta meta;
  meta.h = options.h;
  meta.stage1_cll = stage1_cll;
  SearchOutcome found{refined.theta, refined.objective, stage1.evals + refined.evals};
  return finish(ModelKind::Kplsk, full, found, data.bounds, U, data.y, options, meta, start);
}

FittedSurrogate fit_gek_indirect(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  data.validate(true);
  require(options.fota_step > 0.0 && options.fota_step < 0.1, "gek: fota step must lie in (0, 0.1)");
  const Eigen::Index n = data.samples();
  const Eigen::Index d = data.dim();
  const auto rows = static_cast<std::size_t>(n * (d + 1));
  if (rows > options.row_cap)
    fail(ErrorCode::TooLarge, "gek: " + std::to_string(rows) + " correlation rows exceed the cap of " +
                                  std::to_string(options.row_cap) +
                                  " (the dense n(d+1) system outgrows memory)");
  std::vector<std::vector<Eigen::Index>> all(static_cast<std::size_t>(n));
  for (auto& dirs : all) {
    dirs.resize(static_cast<std::size_t>(d));
    std::iota(dirs.begin(), dirs.end(), Eigen::Index{0});
  }
  const AugmentedSet aug = fota_augment(data, all, options.fota_step);
  FitMeta meta;
  meta.m = static_cast<std::size_t>(d);
  meta.fota_step = options.fota_step;
  FitOptions fota = options;
  fota.nugget = options.fota_nugget;
  return fit_sqexp(ModelKind::GekIndirect, data.bounds, aug.X, aug.y, fota, meta, start);
}

FittedSurrogate fit_gek_direct(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  data.validate(true);
  check_response_variance(data.y);
  const Eigen::Index n = data.samples();
  const Eigen::Index d = data.dim();
  const auto rows = static_cast<std::size_t>(n * (d + 1));
  if (rows > options.row_cap)
    fail(ErrorCode::TooLarge, "gek: " + std::to_string(rows) + " correlation rows exceed the cap of " +
                                  std::to_string(options.row_cap) +
                                  " (the dense n(d+1) system outgrows memory)");
  const Matrix U = data.bounds.to_unit_rows(data.X);
  const Matrix G = (*data.dY) * data.bounds.range().asDiagonal();  // dy/du
  Vector stacked(n * (d + 1));
  stacked.head(n) = data.y;
  for (Eigen::Index i = 0; i < n; ++i) stacked.segment(n + i * d, d) = G.row(i).transpose();
  const auto problem = LikelihoodProblem::direct_gek(U, stacked, options.nugget, options.convention, options.ladder);
  const SearchOutcome found = search_theta(problem, options);
  return finish(ModelKind::GekDirect, problem, found, data.bounds, U, stacked, options, FitMeta{}, start);
}

FittedSurrogate fit_gekpls(const TrainingData& data, const FitOptions& options) {
  const auto start = Clock::now();
  const GeKplsConfig& cfg = options.gekpls;
  const LocalInfluence influence = local_influence(data, cfg);
  const AugmentedSet aug = fota_augment(data, influence.selected, cfg.fota_step);
  check_response_variance(aug.y);
  const Matrix U = data.bounds.to_unit_rows(aug.X);
  const KernelSpec kernel =
      KernelSpec::gekpls(Vector::Ones(static_cast<Eigen::Index>(cfg.h)), influence.averaged, options.fota_nugget);
  const auto problem = LikelihoodProblem::features(U, aug.y, kernel, options.ladder);
  const SearchOutcome found = search_theta(problem, options);
  FitMeta meta;
  meta.h = cfg.h;
  meta.m = cfg.m;
  meta.fota_step = cfg.fota_step;
  return finish(ModelKind::GeKpls, problem, found, data.bounds, U, aug.y, options, meta, start);
}

FittedSurrogate fit(ModelKind kind, const TrainingData& data, const FitOptions& options) {
  switch (kind) {
    case ModelKind::Kriging: return fit_kriging(data, options);
    case ModelKind::Kpls: return fit_kpls(data, options);
    case ModelKind::Kplsk: return fit_kplsk(data, options);
    case ModelKind::GekIndirect: return fit_gek_indirect(data, options);
    case ModelKind::GekDirect: return fit_gek_direct(data, options);
    case ModelKind::GeKpls: return fit_gekpls(data, options);
  }
  fail(ErrorCode::InvalidArgument, "fit: unknown model kind");
}

}  // namespace gekrig
