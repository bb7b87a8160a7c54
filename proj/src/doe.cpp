#include "gekrig/doe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

// One stratified plan in the unit cube: every column is a random permutation
// of the strata with a uniform jitter inside each stratum.
Matrix draw_unit_lhs(std::size_t n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix plan(static_cast<Eigen::Index>(n), d);
  std::vector<std::size_t> strata(n);
  const double width = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      double u = (static_cast<double>(strata[i]) + unit(rng)) * width;
      // Keep the point inside its half-open stratum.
      const double hi = static_cast<double>(strata[i] + 1) * width;
      if (u >= hi) u = std::nextafter(hi, 0.0);
      plan(static_cast<Eigen::Index>(i), j) = u;
    }
  }
  return plan;
}

void check_lhs_args(std::size_t n) {
  require(n >= 2, "lhs: need at least 2 points");
}

}  // namespace

std::vector<Matrix> lhs_candidate_pool(std::size_t n, Eigen::Index d, std::uint64_t seed,
                                       std::size_t pool_size) {
  check_lhs_args(n);
  require(d >= 1, "lhs: dimension must be at least 1");
  require(pool_size >= 1, "lhs: pool size must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Matrix> pool;
  pool.reserve(pool_size);
  for (std::size_t k = 0; k < pool_size; ++k) pool.push_back(draw_unit_lhs(n, d, rng));
  return pool;
}

double min_pairwise_distance(const Matrix& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j)
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
  return std::sqrt(best);
}

SamplingPlan lhs(std::size_t n, const Bounds& bounds, LhsCriterion criterion, std::uint64_t seed,
                 std::size_t pool_size) {
  check_lhs_args(n);
  SamplingPlan plan;
  plan.criterion = criterion;
  plan.seed = seed;
  if (criterion == LhsCriterion::Random) {
    std::mt19937_64 rng(seed);
    plan.points = bounds.from_unit_rows(draw_unit_lhs(n, bounds.dim(), rng));
    return plan;
  }
  const auto pool = lhs_candidate_pool(n, bounds.dim(), seed, pool_size);
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const double dist = min_pairwise_distance(pool[k]);
    if (dist > best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  plan.points = bounds.from_unit_rows(pool[best]);
  return plan;
}

DisplacementSet displacement_set(Eigen::Index d) {
  require(d >= 1, "displacement_set: dimension must be at least 1");
  DisplacementSet set;
  if (d < 3) {
    set.kind = DisplacementKind::ForwardBackward;
    set.offsets = Matrix::Zero(2 * d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      set.offsets(2 * j, j) = 1.0;
      set.offsets(2 * j + 1, j) = -1.0;
    }
    return set;
  }
  set.kind = DisplacementKind::BoxBehnken;
  const Eigen::Index pairs = d * (d - 1) / 2;
  set.offsets = Matrix::Zero(4 * pairs, d);
  Eigen::Index row = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      for (const double sa : {1.0, -1.0}) {
        for (const double sb : {1.0, -1.0}) {
          set.offsets(row, a) = sa;
          set.offsets(row, b) = sb;
          ++row;
        }
      }
    }
  }
  return set;
}

}  // namespace gekrig
