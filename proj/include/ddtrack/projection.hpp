#pragma once

#include <span>

#include "ddtrack/constraint_set.hpp"

namespace ddtrack {

// Feasibility tolerance used throughout the library.
inline constexpr double kFeasibilityTol = 1e-12;

/// Euclidean projection argmin_{v in set} ||y - v||, exact for every variant.
///
/// Throws DimensionMismatch when y does not match a box/ball dimension and
/// NonFiniteInput when y contains NaN or infinity.
Vec project(const ConstraintSet& set, std::span<const double> y);

// Projection onto { x >= 0, sum x <= capacity } by sorting for the
// water-filling threshold. Exposed for direct testing.
Vec project_nonneg_budget(std::span<const double> y, double capacity);

}  // namespace ddtrack
