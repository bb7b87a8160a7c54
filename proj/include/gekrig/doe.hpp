#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gekrig/bounds.hpp"
#include "gekrig/types.hpp"

namespace gekrig {

enum class LhsCriterion { Maximin, Random };

struct SamplingPlan {
  Matrix points;  // n x d, physical coordinates
  LhsCriterion criterion = LhsCriterion::Random;
  std::uint64_t seed = 0;
};

/// Number of random plans screened by the maximin criterion.
inline constexpr std::size_t kDefaultMaximinPool = 50;

/// Latin hypercube plan of n points inside `bounds`.
///
/// Random draws one stratified plan. Maximin draws `pool_size` stratified
/// plans from the same generator and keeps the one whose smallest pairwise
/// distance (measured in the unit cube) is largest; ties keep the earliest.
SamplingPlan lhs(std::size_t n, const Bounds& bounds, LhsCriterion criterion,
                 std::uint64_t seed, std::size_t pool_size = kDefaultMaximinPool);

/// The candidate plans the maximin criterion screens, in draw order, in unit
/// coordinates. lhs(..., Maximin, seed, pool) picks one of these.
std::vector<Matrix> lhs_candidate_pool(std::size_t n, Eigen::Index d, std::uint64_t seed,
                                       std::size_t pool_size);

/// Smallest Euclidean distance between two distinct rows.
double min_pairwise_distance(const Matrix& points);

enum class DisplacementKind { BoxBehnken, ForwardBackward };

/// Unit-scale offsets placed around a sample to build its local FOTA cloud.
/// The sample itself (the center) is not part of the list.
struct DisplacementSet {
  Matrix offsets;  // count x d
  DisplacementKind kind = DisplacementKind::ForwardBackward;
};

/// Box-Behnken pair offsets (4 * C(d,2) rows) when d >= 3, otherwise the 2d
/// forward/backward axis offsets.
DisplacementSet displacement_set(Eigen::Index d);

}  // namespace gekrig
