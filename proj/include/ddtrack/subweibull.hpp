#pragma once

#include <span>

namespace ddtrack {

/// Tail-class descriptor SW(theta, nu): the k-th moment root of the variable
/// satisfies ||z||_k <= nu * k^theta for all k >= 1.
///
/// theta is the tail-heaviness exponent (1/2 is sub-Gaussian-like, 1 is
/// sub-exponential-like) and nu the proxy variance, in the units of z.
/// Descriptors are not unique; they are only ever evaluated, never compared.
struct SubWeibull {
    double theta;
    double nu;

    // Throws DomainError unless theta > 0 and nu > 0.
    SubWeibull(double theta, double nu);
};

// Proposition-level closure rules.
SubWeibull sw_sum(const SubWeibull& a, const SubWeibull& b);
SubWeibull sw_product(const SubWeibull& a, const SubWeibull& b);
// scale * z + shift. Throws DomainError when both are zero.
SubWeibull sw_affine(const SubWeibull& a, double scale, double shift);

// (t1 + t2)^(t1 + t2) / (t1^t1 * t2^t2)
double psi(double theta1, double theta2);

// min(1, 2 exp(-(theta / 2e) (eps / nu)^(1/theta))) for eps > 0.
double tail_bound(const SubWeibull& a, double eps);

// (2e/theta)^theta * log^theta(2/delta); the level multiplier for nu at confidence 1-delta.
double hp_prefactor(double theta, double delta);

// eps with tail_bound(a, eps) == delta, for delta in (0, 1).
double hp_quantile(const SubWeibull& a, double delta);

// Norm of a d-vector whose coordinates are each SW(theta, nu).
SubWeibull sw_vector_norm(std::size_t d, const SubWeibull& per_coordinate);

// Centered bounded variable xi - E[xi] with xi in [lo, hi].
SubWeibull sw_bounded(double lo, double hi);

// Zero-mean Gaussian with standard deviation sigma. The absolute constant
// in the sub-Gaussian norm is not pinned down by the theory; the caller
// supplies it.
SubWeibull sw_gaussian(double sigma, double constant = 1.0);

struct SubWeibullFit {
    double nu = 0.0;
    // All samples zero: no valid descriptor exists (nu must be > 0).
    bool degenerate = false;
    // Moment order attaining the maximum.
    int argmax_order = 0;
};

inline constexpr int kDefaultMomentCap = 10;
inline constexpr std::size_t kMinFitSamples = 100;

/// Empirical proxy variance: nu_hat = max_{1<=k<=K} (mean |z|^k)^(1/k) / k^theta.
///
/// theta is supplied, never estimated. Throws InsufficientData below
/// kMinFitSamples samples and DomainError for theta <= 0 or K < 1.
SubWeibullFit fit_subweibull(std::span<const double> samples, double theta,
                             int max_order = kDefaultMomentCap);

}  // namespace ddtrack
