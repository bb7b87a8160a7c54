#include "gekrig/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gekrig/doe.hpp"
#include "gekrig/errors.hpp"

namespace gekrig {

SearchSpace SearchSpace::uniform(Eigen::Index dim, double lower, double upper) {
  require(dim >= 1, "search space: dimension must be at least 1");
  SearchSpace s{Vector::Constant(dim, lower), Vector::Constant(dim, upper)};
  s.validate();
  return s;
}

void SearchSpace::validate() const {
  require(lower.size() == upper.size() && lower.size() >= 1, "search space: bad dimensions");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    require(lower[i] > 0.0 && std::isfinite(upper[i]), "search space: bounds must be positive and finite");
    require(lower[i] < upper[i], "search space: lower must be below upper");
  }
}

bool SearchSpace::contains(const Vector& theta) const {
  if (theta.size() != dim()) return false;
  return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BudgetExhausted {};

// Objective in log10 coordinates with failure capture and a hard budget.
class LogObjective {
 public:
  LogObjective(const Objective& f, const SearchSpace& space, std::size_t budget)
      : f_(f), budget_(budget), lo_(space.lower.array().log10()), hi_(space.upper.array().log10()) {}

  Vector clip(const Vector& u) const { return u.cwiseMax(lo_).cwiseMin(hi_); }
  Vector theta(const Vector& u) const {
    // Exact bounds are returned at the box faces so that clipped iterates stay
    // feasible after the round trip through log10.
    Vector t(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      t[i] = std::pow(10.0, u[i]);
      if (u[i] <= lo_[i]) t[i] = std::pow(10.0, lo_[i]);
      if (u[i] >= hi_[i]) t[i] = std::pow(10.0, hi_[i]);
    }
    return t;
  }

  double operator()(const Vector& u) {
    if (evals_ >= budget_) throw BudgetExhausted{};
    ++evals_;
    double v = kNegInf;
    try {
      v = f_(theta(u));
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) v = kNegInf;
    } catch (const std::exception& e) {
      last_error_ = e.what();
      v = kNegInf;
    }
    best_ = std::max(best_, v);
    trace_.push_back(best_);
    return v;
  }

  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  std::size_t evals() const { return evals_; }
  const std::vector<double>& trace() const { return trace_; }
  const std::string& last_error() const { return last_error_; }

 private:
  const Objective& f_;
  std::size_t budget_;
  std::size_t evals_ = 0;
  Vector lo_;
  Vector hi_;
  double best_ = kNegInf;
  std::vector<double> trace_;
  std::string last_error_;
};

struct StartResult {
  Vector u;
  double value = kNegInf;
  bool converged = false;
  std::size_t evals = 0;
  std::vector<double> trace;
  std::string last_error;
};

StartResult nelder_mead(const Objective& f, const SearchSpace& space, const Vector& start,
                        const DerivativeFreeOptions& opt, std::size_t budget) {
  LogObjective obj(f, space, budget);
  const Eigen::Index n = start.size();
  std::vector<Vector> simplex;
  std::vector<double> values;
  StartResult out;

  auto best_index = [&] {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  };

  try {
    simplex.push_back(obj.clip(start));
    values.push_back(obj(simplex[0]));
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector v = simplex[0];
      const double step = v[i] + opt.initial_step <= obj.hi()[i] ? opt.initial_step : -opt.initial_step;
      v[i] += step;
      v = obj.clip(v);
      simplex.push_back(v);
      values.push_back(obj(v));
    }

    std::vector<std::size_t> order(simplex.size());
    while (true) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
      const std::size_t ib = order.front();
      const std::size_t iw = order.back();
      const std::size_t isw = order[order.size() - 2];

      double diameter = 0.0;
      for (const auto& v : simplex)
        diameter = std::max(diameter, (v - simplex[ib]).cwiseAbs().maxCoeff());
      const double spread = values[ib] - values[iw];
      if (std::isfinite(values[ib]) && std::isfinite(values[iw]) &&
          spread <= opt.ftol * (1.0 + std::abs(values[ib])) && diameter <= opt.xtol) {
        out.converged = true;
        break;
      }
      if (diameter <= 1e-12) {
        out.converged = std::isfinite(values[ib]);
        break;
      }

      Vector centroid = Vector::Zero(n);
      for (std::size_t k = 0; k < simplex.size(); ++k)
        if (k != iw) centroid += simplex[k];
      centroid /= static_cast<double>(n);

      const Vector xr = obj.clip(centroid + (centroid - simplex[iw]));
      const double fr = obj(xr);
      if (fr > values[ib]) {
        const Vector xe = obj.clip(centroid + 2.0 * (centroid - simplex[iw]));
        const double fe = obj(xe);
        if (fe > fr) {
          simplex[iw] = xe;
          values[iw] = fe;
        } else {
          simplex[iw] = xr;
          values[iw] = fr;
        }
        continue;
      }
      if (fr > values[isw]) {
        simplex[iw] = xr;
        values[iw] = fr;
        continue;
      }
      const bool outside = fr > values[iw];
      const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                                : Vector(centroid + 0.5 * (simplex[iw] - centroid));
      const double fc = obj(xc);
      if ((outside && fc >= fr) || (!outside && fc > values[iw])) {
        simplex[iw] = xc;
        values[iw] = fc;
        continue;
      }
      for (std::size_t k = 0; k < simplex.size(); ++k) {
        if (k == ib) continue;
        simplex[k] = simplex[ib] + 0.5 * (simplex[k] - simplex[ib]);
        values[k] = obj(simplex[k]);
      }
    }
  } catch (const BudgetExhausted&) {
  }

  if (!values.empty()) {
    const std::size_t ib = best_index();
    out.u = simplex[ib];
    out.value = values[ib];
  } else {
    out.u = obj.clip(start);
  }
  out.evals = obj.evals();
  out.trace = obj.trace();
  out.last_error = obj.last_error();
  return out;
}

}  // namespace

OptResult maximize_derivative_free(const Objective& f, const SearchSpace& space,
                                   const DerivativeFreeOptions& options) {
  space.validate();
  const Eigen::Index dim = space.dim();
  const std::size_t starts = std::max<std::size_t>(options.starts, 1);
  const std::size_t budget =
      options.budget_per_start > 0 ? options.budget_per_start : 30 * static_cast<std::size_t>(dim);
  require(budget >= static_cast<std::size_t>(dim) + 2, "optimizer: budget must be at least dim + 2 per start");

  const Vector lo = space.lower.array().log10();
  const Vector hi = space.upper.array().log10();
  std::vector<Vector> initial;
  initial.push_back(Vector::Constant(dim, std::log10(options.first_start)));
  if (starts >= 3) {
    const SamplingPlan plan = lhs(starts - 1, Bounds(lo, hi), LhsCriterion::Random, options.seed);
    for (Eigen::Index k = 0; k < plan.points.rows(); ++k) initial.push_back(plan.points.row(k).transpose());
  } else if (starts == 2) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector u(dim);
    for (Eigen::Index i = 0; i < dim; ++i) u[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
    initial.push_back(u);
  }

  std::vector<StartResult> results(initial.size());
  const auto count = static_cast<std::ptrdiff_t>(initial.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel_starts)
  for (std::ptrdiff_t s = 0; s < count; ++s)
    results[static_cast<std::size_t>(s)] = nelder_mead(f, space, initial[static_cast<std::size_t>(s)], options, budget);

  std::size_t best = 0;
  std::size_t total = 0;
  std::string last_error;
  for (std::size_t s = 0; s < results.size(); ++s) {
    total += results[s].evals;
    if (!results[s].last_error.empty()) last_error = results[s].last_error;
    if (results[s].value > results[best].value) best = s;
  }
  if (!(results[best].value > kNegInf))
    fail(ErrorCode::OptimizationFailed,
         "optimizer: every evaluation failed" + (last_error.empty() ? std::string() : ": " + last_error));

  OptResult out;
  LogObjective map(f, space, 0);
  out.theta = map.theta(results[best].u);
  out.objective = results[best].value;
  out.evals = total;
  out.converged = results[best].converged;
  out.trace = std::move(results[best].trace);
  return out;
}

OptResult maximize_gradient_based(const Objective& f, const Gradient& grad, const Vector& theta0,
                                  const SearchSpace& space, const GradientOptions& options) {
  space.validate();
  require(theta0.size() == space.dim(), "optimizer: theta0 dimension mismatch");
  require(space.contains(theta0), "optimizer: theta0 outside the search space");
  const Eigen::Index n = theta0.size();
  LogObjective obj(f, space, std::max<std::size_t>(options.budget, 1));
  const double ln10 = std::log(10.0);

  auto log_grad = [&](const Vector& u) -> Vector {
    const Vector t = obj.theta(u);
    Vector g;
    try {
      g = grad(t);
    } catch (const std::exception&) {
      return Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    }
    return (g.array() * t.array() * ln10).matrix();
  };

  Vector u = obj.clip(theta0.array().log10().matrix());
  double fu = obj(u);
  Vector g = log_grad(u);
  if (!std::isfinite(fu) || !g.allFinite())
    fail(ErrorCode::OptimizationFailed, "optimizer: non-finite objective or gradient at the starting point" +
                                            (obj.last_error().empty() ? std::string() : ": " + obj.last_error()));

  OptResult out;
  Matrix H = Matrix::Identity(n, n);
  auto projected = [&](const Vector& grad_u) {
    Vector pg = grad_u;
    for (Eigen::Index k = 0; k < n; ++k) {
      const bool at_lo = u[k] <= obj.lo()[k] && grad_u[k] < 0.0;
      const bool at_hi = u[k] >= obj.hi()[k] && grad_u[k] > 0.0;
      if (at_lo || at_hi) pg[k] = 0.0;
    }
    return pg;
  };

  try {
    while (true) {
      const Vector pg = projected(g);
      if (pg.cwiseAbs().maxCoeff() <= options.gtol) {
        out.converged = true;
        break;
      }
      Vector dir = H * pg;
      for (Eigen::Index k = 0; k < n; ++k)
        if (pg[k] == 0.0) dir[k] = 0.0;
      if (!(dir.dot(pg) > 0.0)) {
        H.setIdentity();
        dir = pg;
      }
      const double len = dir.cwiseAbs().maxCoeff();
      if (len > options.max_step) dir *= options.max_step / len;

      bool accepted = false;
      Vector un;
      double fn = kNegInf;
      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        un = obj.clip(u + alpha * dir);
        if ((un - u).cwiseAbs().maxCoeff() < 1e-14) break;
        fn = obj(un);
        if (std::isfinite(fn) && fn > fu) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (H.isIdentity(0.0)) {
          out.converged = true;  // no ascent direction left at this resolution
          break;
        }
        H.setIdentity();
        continue;
      }
      const Vector gn = log_grad(un);
      if (!gn.allFinite()) {
        u = un;
        fu = fn;
        break;
      }
      const Vector s = un - u;
      const Vector yv = g - gn;
      const double sy = s.dot(yv);
      if (sy > 1e-12 * s.norm() * yv.norm()) {
        const double rho = 1.0 / sy;
        const Matrix I = Matrix::Identity(n, n);
        H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
      }
      u = un;
      fu = fn;
      g = gn;
    }
  } catch (const BudgetExhausted&) {
  }

  out.theta = obj.theta(u);
  out.objective = fu;
  out.evals = obj.evals();
  out.trace = obj.trace();
  return out;
}

}  // namespace gekrig
