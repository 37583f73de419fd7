#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "ddtrack/vec.hpp"

namespace ddtrack {

struct FullSpace {};

// Coordinatewise bounds lo <= x <= hi.
struct Box {
    Vec lo;
    Vec hi;
};

struct EuclideanBall {
    Vec center;
    double radius = 1.0;
};

// { x : sum_i x_i <= capacity }
struct BudgetHalfspace {
    double capacity = 0.0;
};

// { x : x >= 0, sum_i x_i <= capacity }
struct NonnegBudget {
    double capacity = 0.0;
};

using ConstraintSet = std::variant<FullSpace, Box, EuclideanBall, BudgetHalfspace, NonnegBudget>;

// Throws InvalidConstants if the parameters do not describe a closed convex
// set (radius <= 0, hi < lo, non-finite capacity, negative nonneg capacity).
void validate(const ConstraintSet& set);

// Intrinsic dimension of the set, or nullopt for variants valid in any dimension.
std::optional<std::size_t> intrinsic_dimension(const ConstraintSet& set);

// Membership with an absolute tolerance on every defining inequality.
bool contains(const ConstraintSet& set, std::span<const double> x, double tol = 1e-12);

// Largest Euclidean norm attained on the set, +inf when unbounded.
double max_norm(const ConstraintSet& set);

std::string describe(const ConstraintSet& set);

}  // namespace ddtrack
