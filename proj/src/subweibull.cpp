#include "ddtrack/subweibull.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ddtrack/errors.hpp"

namespace ddtrack {

SubWeibull::SubWeibull(double theta_, double nu_) : theta(theta_), nu(nu_) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw DomainError("sub-Weibull: theta must be positive, got " + std::to_string(theta));
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw DomainError("sub-Weibull: nu must be positive, got " + std::to_string(nu));
}

SubWeibull sw_sum(const SubWeibull& a, const SubWeibull& b) {
    return {std::max(a.theta, b.theta), a.nu + b.nu};
}

double psi(double t1, double t2) {
    // log-domain keeps large exponents finite
    const double s = t1 + t2;
    return std::exp(s * std::log(s) - t1 * std::log(t1) - t2 * std::log(t2));
}

SubWeibull sw_product(const SubWeibull& a, const SubWeibull& b) {
    return {a.theta + b.theta, psi(a.theta, b.theta) * a.nu * b.nu};
}

SubWeibull sw_affine(const SubWeibull& a, double scale, double shift) {
    if (scale == 0.0 && shift == 0.0)
        throw DomainError("sw_affine: zero scale and zero shift give a degenerate descriptor");
    return {a.theta, std::abs(scale) * a.nu + std::abs(shift)};
}

double tail_bound(const SubWeibull& a, double eps) {
    if (!(eps > 0.0)) throw DomainError("tail_bound: epsilon must be positive");
    const double exponent = (a.theta / (2.0 * std::numbers::e)) * std::pow(eps / a.nu, 1.0 / a.theta);
    return std::min(1.0, 2.0 * std::exp(-exponent));
}

double hp_prefactor(double theta, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("confidence delta must lie in (0, 1), got " + std::to_string(delta));
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    return std::pow(2.0 * std::numbers::e / theta, theta) * std::pow(std::log(2.0 / delta), theta);
}

double hp_quantile(const SubWeibull& a, double delta) {
    return hp_prefactor(a.theta, delta) * a.nu;
}

SubWeibull sw_vector_norm(std::size_t d, const SubWeibull& c) {
    if (d < 1) throw DomainError("sw_vector_norm: dimension must be >= 1");
    return {c.theta, std::pow(2.0, c.theta) * std::sqrt(static_cast<double>(d)) * c.nu};
}

SubWeibull sw_bounded(double lo, double hi) {
    if (!(hi > lo)) throw DomainError("sw_bounded: requires hi > lo");
    return {0.5, (hi - lo) / std::numbers::sqrt2};
}

SubWeibull sw_gaussian(double sigma, double constant) {
    return {0.5, constant * sigma};
}

SubWeibullFit fit_subweibull(std::span<const double> samples, double theta, int max_order) {
    if (samples.size() < kMinFitSamples)
        throw InsufficientData("fit_subweibull: need at least " + std::to_string(kMinFitSamples) +
                               " samples, got " + std::to_string(samples.size()));
    if (!(theta > 0.0)) throw DomainError("fit_subweibull: theta must be positive");
    if (max_order < 1) throw DomainError("fit_subweibull: moment cap must be >= 1");

    double scale = 0.0;
    for (double z : samples) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return {0.0, true, 1};

    // ||z||_k = scale * (mean (|z|/scale)^k)^(1/k), which cannot overflow.
    const auto n = static_cast<double>(samples.size());
    SubWeibullFit fit;
    for (int k = 1; k <= max_order; ++k) {
        double acc = 0.0;
        for (double z : samples) acc += std::pow(std::abs(z) / scale, k);
        const double moment_root = scale * std::pow(acc / n, 1.0 / k);
        const double candidate = moment_root / std::pow(static_cast<double>(k), theta);
        if (candidate > fit.nu) {
            fit.nu = candidate;
            fit.argmax_order = k;
        }
    }
    return fit;
}

}  // namespace ddtrack
