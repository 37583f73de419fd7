#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "ddtrack/loss.hpp"
#include "ddtrack/vec.hpp"

namespace ddtrack {

using Rng = std::mt19937_64;

/// Decision-dependent distribution with independent coordinates
/// z_i ~ N(mu_scale * x_i, sigma^2). A translation family, so its
/// Wasserstein-1 sensitivity is exactly |mu_scale|.
struct GaussianLocationMap {
    double mu_scale = 0.0;
    double sigma = 1.0;

    void validate() const;
    [[nodiscard]] double sensitivity() const;
    [[nodiscard]] Vec mean(std::span<const double> x) const;
};

// n realisations of a d-dimensional variable, stored row-major.
struct SampleBatch {
    std::size_t n = 0;
    std::size_t d = 0;
    Vec values;
    std::size_t step = 0;

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * d, d);
    }
};

// Deterministic given the generator state.
SampleBatch sample(const GaussianLocationMap& map, std::span<const double> x, std::size_t n, Rng& rng,
                   std::size_t step = 0);

/// grad_x E_{z ~ D(y)} l(x, z), in closed form.
///
/// Gradient and expectation commute here because both families are linear in z.
Vec expected_gradient(const GaussianLocationMap& map, const Loss& loss, std::span<const double> x,
                      std::span<const double> y);

// Mini-batch gradient (1/N) sum_j grad_x l(x, z_j).
Vec batch_gradient(const Loss& loss, std::span<const double> x, const SampleBatch& batch);

/// One-dimensional empirical W1 through the sorted (quantile) coupling:
/// (1/n) sum_i |a_(i) - b_(i)|.
///
/// Unequal lengths are truncated to the shorter one with a warning.
/// Throws InsufficientData when either input is empty.
double w1_empirical_1d(std::span<const double> a, std::span<const double> b);

// W1(D(x), D(x')) for a translation family: the norm of the mean shift.
double w1_translation(const GaussianLocationMap& map, std::span<const double> x,
                      std::span<const double> x_prime);

/// Monte Carlo estimate of the sensitivity W1(D(x), D(x')) / ||x - x'||.
///
/// Each coordinate uses common random numbers for the two draws; the per
/// coordinate empirical W1 values are combined as a Euclidean norm.
/// Throws DomainError when x == x'.
double sensitivity_estimate(const GaussianLocationMap& map, std::span<const double> x,
                            std::span<const double> x_prime, std::size_t n, Rng& rng);

// splitmix64 finaliser; derives independent seeds from a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace ddtrack
