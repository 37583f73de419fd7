#pragma once

#include <optional>
#include <span>
#include <variant>

#include "ddtrack/vec.hpp"

namespace ddtrack {

// l(x, z) = sum_i x_i^2 + z_i. The data enters only additively, so the
// gradient 2x never sees z.
struct Example1Loss {};

// l(x, z) = sum_i z_i x_i - gamma_i x_i + kappa_i x_i^2
// (charging cost, aggressiveness, satisfaction). Requires kappa_i > 0.
struct QuadraticSeparableLoss {
    Vec gamma;
    Vec kappa;
};

using Loss = std::variant<Example1Loss, QuadraticSeparableLoss>;

// Fixed dimension of the loss, nullopt when it adapts to x.
std::optional<std::size_t> loss_dimension(const Loss& loss);

double loss_value(const Loss& loss, std::span<const double> x, std::span<const double> z);

// grad_x l(x, z) for one realisation z.
Vec loss_gradient(const Loss& loss, std::span<const double> x, std::span<const double> z);

// The Hessian in x is constant and diagonal for both families.
Vec hessian_diagonal(const Loss& loss, std::size_t d);

struct LossCurvature {
    double hessian_min;  // strong convexity modulus
    double hessian_max;  // Lipschitz constant of x -> grad_x l
    double z_lipschitz;  // Lipschitz constant of z -> grad_x l
};

LossCurvature curvature(const Loss& loss, std::size_t d);

void validate(const Loss& loss);

}  // namespace ddtrack
