#include "ddtrack/bounds.hpp"

#include <string>

#include "ddtrack/algorithms.hpp"
#include "ddtrack/errors.hpp"
#include "ddtrack/subweibull.hpp"

namespace ddtrack {

namespace {

void require_length(const Vec& v, std::size_t n, const char* name) {
    if (v.size() != n)
        throw DimensionMismatch(std::string("bounds: ") + name + " has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(n));
}

void check_common(const BoundInputs& in) {
    require_length(in.phi, in.lambda.size(), "phi");
    for (double l : in.lambda)
        if (!(l >= 0.0)) throw DomainError("bounds: lambda must be >= 0");
    for (double p : in.phi)
        if (!(p >= 0.0)) throw DomainError("bounds: phi must be >= 0");
    if (!(in.e0 >= 0.0)) throw DomainError("bounds: e0 must be >= 0");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("bounds: delta must lie in (0, 1)");
}

// a_t e0 + sum_{i=0}^{t} b_i w_i for t = 0..n-1, preceded by e0.
Vec unrolled(const Vec& lambda, const Vec& w, double e0) {
    const std::size_t n = lambda.size();
    Vec out(n + 1);
    out[0] = e0;
    for (std::size_t t = 0; t < n; ++t) {
        double a = 1.0;
        for (std::size_t i = 0; i <= t; ++i) a *= lambda[i];
        double acc = a * e0;
        for (std::size_t i = 0; i <= t; ++i) {
            double b = 1.0;
            for (std::size_t k = i + 1; k <= t; ++k) b *= lambda[k];
            acc += b * w[i];
        }
        out[t + 1] = acc;
    }
    return out;
}

Vec noisy_disturbance(const BoundInputs& in, const Vec& noise, const char* name) {
    require_length(in.eta, in.lambda.size(), "eta");
    require_length(noise, in.lambda.size(), name);
    Vec w(in.phi.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(noise[i] >= 0.0)) throw DomainError(std::string("bounds: ") + name + " must be >= 0");
        w[i] = in.phi[i] + in.eta[i] * noise[i];
    }
    return w;
}

}  // namespace

Vec opgd_envelope(const BoundInputs& in) {
    check_common(in);
    return unrolled(in.lambda, in.phi, in.e0);
}

Vec ospgd_expectation_envelope(const BoundInputs& in) {
    check_common(in);
    return unrolled(in.lambda, noisy_disturbance(in, in.xi_mean, "xi_mean"), in.e0);
}

Vec ospgd_hp_envelope(const BoundInputs& in) {
    check_common(in);
    check_delta(in.delta);
    const double factor = hp_prefactor(in.theta, in.delta);
    Vec out = unrolled(in.lambda, noisy_disturbance(in, in.nu, "nu"), in.e0);
    for (double& v : out) v *= factor;
    return out;
}

Vec markov_envelope(const BoundInputs& in) {
    check_delta(in.delta);
    Vec out = ospgd_expectation_envelope(in);
    for (double& v : out) v /= in.delta;
    return out;
}

double limsup_bound(double lambda_tilde, double phi_tilde) {
    if (!(lambda_tilde >= 0.0 && lambda_tilde < 1.0))
        throw DomainError("limsup_bound: lambda must lie in [0, 1), got " + std::to_string(lambda_tilde));
    return phi_tilde / (1.0 - lambda_tilde);
}

double stable_optimum_gap(double eps, double gamma_lip, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("stable_optimum_gap: alpha must be positive");
    if (eps == 0.0) return 0.0;
    return 2.0 * eps * gamma_lip / alpha;
}

Vec lambda_sequence(const RegularityConstants& c, std::span<const double> eta, std::size_t count) {
    if (count > c.horizon() || count > eta.size()) throw DimensionMismatch("lambda_sequence: count exceeds horizon");
    Vec out(count);
    for (std::size_t t = 0; t < count; ++t) out[t] = contraction_factor(c.alpha[t], c.beta[t], c.eps[t], eta[t]).lambda;
    return out;
}

}  // namespace ddtrack
