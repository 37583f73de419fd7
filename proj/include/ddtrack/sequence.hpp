#pragma once

#include <span>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "ddtrack/vec.hpp"

namespace ddtrack {

/// Expands a per-step sequence descriptor into T values.
///
/// Accepted forms:
///   3.5                                   constant
///   [v0, v1, ..., v_{T-1}]                explicit, length must equal T
///   {"type": "constant", "value": v}
///   {"type": "piecewise-linear", "knots": [[t0, v0], [t1, v1], ...]}
///
/// Piecewise-linear knots must have strictly increasing t; values are
/// linearly interpolated and held constant outside the knot range.
/// Throws ParseError naming `field` on any malformed descriptor.
Vec expand_sequence(const nlohmann::json& descriptor, std::size_t T, std::string_view field);

// Linear interpolation through (t, v) knots, clamped at the ends.
double piecewise_linear(std::span<const std::pair<double, double>> knots, double t);

}  // namespace ddtrack
