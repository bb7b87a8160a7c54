#include "gekrig/benchmarks.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGravity = 9.80665;

Bounds bounds_of(std::initializer_list<std::pair<double, double>> ranges) {
  Vector lo(static_cast<Eigen::Index>(ranges.size())), hi(lo.size());
  Eigen::Index k = 0;
  for (const auto& [a, b] : ranges) {
    lo[k] = a;
    hi[k] = b;
    ++k;
  }
  return Bounds(lo, hi);
}

double welded_tau(const Vector& x) {
  const double h = x[0], l = x[2], t = x[3];
  const double root = std::sqrt(0.25 * (l * l + (h + t) * (h + t)));
  const double tp = 6000.0 / (std::sqrt(2.0) * h * l);
  const double tpp = 6000.0 * (14.0 + 0.5 * l) * root / (2.0 * (0.707 * h * l * (l * l / 12.0 + 0.25 * (h + t) * (h + t))));
  return std::sqrt((tp * tp + tpp * tpp + l * tp * tpp) / root);
}

double borehole(const Vector& x) {
  const double rw = x[0], Tu = x[1], Tl = x[2], L = x[3], r = x[4], Hu = x[5], Hl = x[6], Kw = x[7];
  const double lg = std::log(r / rw);
  return 2.0 * kPi * Tu * (Hu - Hl) / (lg * (1.0 + 2.0 * L * Tu / (lg * rw * rw * Kw) + Tu / Tl));
}

double robot_arm(const Vector& x) {
  double u = 0.0, v = 0.0, angle = 0.0;
  for (int i = 0; i < 4; ++i) {
    angle += x[4 + i];
    u += x[i] * std::cos(angle);
    v += x[i] * std::sin(angle);
  }
  return std::sqrt(u * u + v * v);
}

double wing_weight(const Vector& x) {
  const double Sw = x[0], A = x[1], q = x[2], tc = x[3], Wdg = x[4], Wfw = x[5], lam = x[7], Nz = x[8], Wp = x[9];
  const double c = std::cos(x[6] * kPi / 180.0);
  return 0.036 * std::pow(Sw, 0.758) * std::pow(Wfw, 0.0035) * (A / (c * c)) * std::pow(q, 0.006) *
             std::pow(lam, 0.04) * std::pow(100.0 * tc / c, -0.3) * std::pow(Nz * Wdg, 0.49) +
         Sw * Wp;
}

double torsion_weight(const Vector& x) {
  // d1 d2 d3 D1 rho1 t2 L1 lambda1 L2 lambda2 L3 lambda3 t1 D2 rho2
  const double d[3] = {x[0], x[1], x[2]};
  const double L[3] = {x[6], x[8], x[10]};
  const double lam[3] = {x[7], x[9], x[11]};
  const double D[2] = {x[3], x[13]};
  const double rho[2] = {x[4], x[14]};
  const double t[2] = {x[12], x[5]};
  double y = 0.0;
  for (int i = 0; i < 3; ++i) y += lam[i] * kPi * L[i] * (d[i] / 2.0) * (d[i] / 2.0);
  for (int j = 0; j < 2; ++j) y += rho[j] * kPi * t[j] * (D[j] / 2.0) * (D[j] / 2.0);
  return y;
}

double torsion_frequency(const Vector& x, FormulaMode mode) {
  // d1 G1 d2 G2 d3 G3 D1 rho1 t2 L1 L2 L3 t1 D2 rho2
  const double d[3] = {x[0], x[2], x[4]};
  const double G[3] = {x[1], x[3], x[5]};
  const double L[3] = {x[9], x[10], x[11]};
  const double D[2] = {x[6], x[13]};
  const double rho[2] = {x[7], x[14]};
  const double t[2] = {x[12], x[8]};
  double K[3], J[2];
  for (int i = 0; i < 3; ++i) {
    const double di = mode == FormulaMode::Corrected ? std::pow(d[i], 4) : d[i];
    K[i] = kPi * G[i] * di / (32.0 * L[i]);
  }
  for (int j = 0; j < 2; ++j) {
    const double M = rho[j] * kPi * t[j] * D[j] / (4.0 * kGravity);
    J[j] = 0.5 * M * D[j] / 2.0;
  }
  const double b = -((K[0] + K[1]) / J[0] + (K[1] + K[2]) / J[1]);
  const double c = (K[0] * K[1] + K[1] * K[2] + K[2] * K[0]) / (J[0] * J[1]);
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) fail(ErrorCode::DomainError, "p8: negative discriminant");
  const double w2 = (-b - std::sqrt(disc)) / 2.0;
  if (w2 < 0.0) fail(ErrorCode::DomainError, "p8: negative frequency squared");
  return std::sqrt(w2) / (2.0 * kPi);
}

}  // namespace

BenchmarkFunction::BenchmarkFunction(FunctionId id, std::string name, Bounds bounds,
                                     std::vector<std::string> variables, Eval eval,
                                     std::function<Vector(const Vector&)> analytic_grad)
    : id_(id),
      name_(std::move(name)),
      bounds_(std::move(bounds)),
      variables_(std::move(variables)),
      eval_(std::move(eval)),
      grad_(std::move(analytic_grad)),
      check_bounds_(id != FunctionId::Y1 && id != FunctionId::Y2) {
  require(static_cast<Eigen::Index>(variables_.size()) == bounds_.dim(), "benchmark: one name per variable");
}

double BenchmarkFunction::operator()(const Vector& x) const {
  require(x.size() == dim(), name_ + ": wrong input dimension");
  if (check_bounds_) require(bounds_.contains(x, 1e-12), name_ + ": input outside the variable ranges");
  return eval_(x);
}

Vector BenchmarkFunction::fd_gradient(const Vector& x, double relative_step) const {
  require(x.size() == dim(), name_ + ": wrong input dimension");
  require(relative_step > 0.0, "fd_gradient: step must be positive");
  Vector g(dim());
  const Vector range = bounds_.range();
  for (Eigen::Index j = 0; j < dim(); ++j) {
    const double h = relative_step * std::max(std::abs(x[j]), range[j]);
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (eval_(xp) - eval_(xm)) / (2.0 * h);
  }
  return g;
}

Vector BenchmarkFunction::gradient(const Vector& x) const {
  require(x.size() == dim(), name_ + ": wrong input dimension");
  if (grad_) return grad_(x);
  return fd_gradient(x);
}

Vector BenchmarkFunction::evaluate(const Matrix& X) const {
  require(X.cols() == dim(), name_ + ": wrong input dimension");
  Vector y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = (*this)(X.row(i).transpose());
  return y;
}

Matrix BenchmarkFunction::gradients(const Matrix& X) const {
  require(X.cols() == dim(), name_ + ": wrong input dimension");
  Matrix G(X.rows(), dim());
  for (Eigen::Index i = 0; i < X.rows(); ++i) G.row(i) = gradient(X.row(i).transpose()).transpose();
  return G;
}

double eval_y1(const Vector& x) { return x.squaredNorm(); }
Vector grad_y1(const Vector& x) { return 2.0 * x; }

double eval_y2(const Vector& x) {
  require(x.size() >= 1, "y2: empty input");
  return x[0] * x[0] * x[0] + x.tail(x.size() - 1).squaredNorm();
}

Vector grad_y2(const Vector& x) {
  require(x.size() >= 1, "y2: empty input");
  Vector g = 2.0 * x;
  g[0] = 3.0 * x[0] * x[0];
  return g;
}

BenchmarkFunction make_function(FunctionId id, Eigen::Index d, FormulaMode mode) {
  auto fixed = [&](Eigen::Index n) {
    require(d == 0 || d == n, "benchmark: this problem has fixed dimension " + std::to_string(n));
  };
  auto names = [](std::string prefix, Eigen::Index n) {
    std::vector<std::string> v;
    for (Eigen::Index i = 1; i <= n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
  };
  switch (id) {
    case FunctionId::Y1:
    case FunctionId::Y2: {
      require(d >= 1, "benchmark: y1/y2 need a dimension");
      const bool one = id == FunctionId::Y1;
      return BenchmarkFunction(id, (one ? "y1:" : "y2:") + std::to_string(d), Bounds::uniform(d, -10.0, 10.0),
                               names("x", d), one ? eval_y1 : eval_y2, one ? grad_y1 : grad_y2);
    }
    case FunctionId::P1:
      fixed(2);
      return BenchmarkFunction(id, "p1", bounds_of({{0.1, 1.0}, {5.0, 10.0}}), {"b", "t"},
                               [](const Vector& x) { return 2.1952 / (x[1] * x[1] * x[1] * x[0]); });
    case FunctionId::P2:
      fixed(2);
      return BenchmarkFunction(id, "p2", bounds_of({{0.1, 1.0}, {5.0, 10.0}}), {"b", "t"},
                               [](const Vector& x) { return 504000.0 / (x[1] * x[1] * x[0]); });
    case FunctionId::P3:
      fixed(4);
      return BenchmarkFunction(id, "p3", bounds_of({{0.125, 1.0}, {0.1, 1.0}, {5.0, 10.0}, {5.0, 10.0}}),
                               {"h", "b", "l", "t"}, welded_tau);
    case FunctionId::P4:
      fixed(8);
      return BenchmarkFunction(id, "p4",
                               bounds_of({{0.05, 0.15},
                                          {63070.0, 115600.0},
                                          {63.1, 116.0},
                                          {1120.0, 1680.0},
                                          {100.0, 50000.0},
                                          {990.0, 1110.0},
                                          {700.0, 820.0},
                                          {9855.0, 12045.0}}),
                               {"r_w", "T_u", "T_l", "L", "r", "H_u", "H_l", "K_w"}, borehole);
    case FunctionId::P5: {
      fixed(8);
      Vector lo = Vector::Zero(8), hi(8);
      hi << 1, 1, 1, 1, 2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi;
      return BenchmarkFunction(id, "p5", Bounds(lo, hi),
                               {"L1", "L2", "L3", "L4", "theta1", "theta2", "theta3", "theta4"}, robot_arm);
    }
    case FunctionId::P6:
      fixed(10);
      return BenchmarkFunction(id, "p6",
                               bounds_of({{150.0, 200.0},
                                          {6.0, 10.0},
                                          {16.0, 45.0},
                                          {0.08, 0.18},
                                          {1700.0, 2500.0},
                                          {220.0, 300.0},
                                          {-10.0, 10.0},
                                          {0.5, 1.0},
                                          {2.5, 6.0},
                                          {0.025, 0.08}}),
                               {"S_w", "A", "q", "tc", "W_dg", "W_fw", "Lambda", "lambda", "N_z", "W_p"},
                               wing_weight);
    case FunctionId::P7:
      fixed(15);
      return BenchmarkFunction(id, "p7",
                               bounds_of({{1.8, 2.2},
                                          {1.638, 2.002},
                                          {2.025, 2.475},
                                          {10.8, 13.2},
                                          {0.252, 0.308},
                                          {3.6, 4.4},
                                          {9.0, 11.0},
                                          {0.252, 0.308},
                                          {10.8, 13.2},
                                          {0.144, 0.176},
                                          {7.2, 8.8},
                                          {0.09, 0.11},
                                          {2.7, 3.3},
                                          {12.6, 15.4},
                                          {0.09, 0.11}}),
                               {"d1", "d2", "d3", "D1", "rho1", "t2", "L1", "lambda1", "L2", "lambda2", "L3",
                                "lambda3", "t1", "D2", "rho2"},
                               torsion_weight);
    case FunctionId::P8:
      fixed(15);
      return BenchmarkFunction(id, "p8",
                               bounds_of({{1.8, 2.2},
                                          {105300000.0, 128700000.0},
                                          {1.638, 2.002},
                                          {5580000.0, 6820000.0},
                                          {2.025, 2.475},
                                          {3510000.0, 4290000.0},
                                          {10.8, 13.2},
                                          {0.252, 0.308},
                                          {3.6, 4.4},
                                          {9.0, 11.0},
                                          {10.8, 13.2},
                                          {7.2, 8.8},
                                          {2.7, 3.3},
                                          {12.6, 15.4},
                                          {0.09, 0.11}}),
                               {"d1", "G1", "d2", "G2", "d3", "G3", "D1", "rho1", "t2", "L1", "L2", "L3", "t1",
                                "D2", "rho2"},
                               [mode](const Vector& x) { return torsion_frequency(x, mode); });
  }
  fail(ErrorCode::InvalidArgument, "benchmark: unknown function id");
}

BenchmarkFunction function_from_string(std::string_view key, FormulaMode mode) {
  std::string k(key);
  for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto colon = k.find(':');
  const std::string head = k.substr(0, colon);
  Eigen::Index d = 0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      d = std::stol(k.substr(colon + 1), &used);
      require(used == k.size() - colon - 1, "");
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "benchmark: bad dimension in '" + std::string(key) + "'");
    }
  }
  if (head == "y1" || head == "y2") {
    require(colon != std::string::npos && d >= 1, "benchmark: '" + head + "' needs a dimension, e.g. y1:10");
    return make_function(head == "y1" ? FunctionId::Y1 : FunctionId::Y2, d, mode);
  }
  static const std::pair<const char*, FunctionId> table[] = {
      {"p1", FunctionId::P1}, {"p2", FunctionId::P2}, {"p3", FunctionId::P3}, {"p4", FunctionId::P4},
      {"p5", FunctionId::P5}, {"p6", FunctionId::P6}, {"p7", FunctionId::P7}, {"p8", FunctionId::P8}};
  for (const auto& [name, id] : table)
    if (head == name) return make_function(id, d, mode);
  fail(ErrorCode::InvalidArgument, "benchmark: unknown function '" + std::string(key) + "'");
}

double relative_error(const Vector& y_true, const Vector& y_hat) {
  require(y_true.size() == y_hat.size(), "relative_error: size mismatch");
  const double denom = y_true.norm();
  require(denom > 0.0, "relative_error: truth has zero norm");
  return (y_true - y_hat).norm() / denom;
}

}  // namespace gekrig
