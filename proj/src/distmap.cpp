#include "ddtrack/distmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddtrack/diagnostics.hpp"
#include "ddtrack/errors.hpp"

namespace ddtrack {

void GaussianLocationMap::validate() const {
    if (!std::isfinite(mu_scale)) throw InvalidConstants("gaussian map: non-finite location slope");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidConstants("gaussian map: sigma must be positive and finite");
}

double GaussianLocationMap::sensitivity() const { return std::abs(mu_scale); }

Vec GaussianLocationMap::mean(std::span<const double> x) const {
    Vec m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m[i] = mu_scale * x[i];
    return m;
}

SampleBatch sample(const GaussianLocationMap& map, std::span<const double> x, std::size_t n, Rng& rng,
                   std::size_t step) {
    if (n < 1) throw DomainError("sample: batch size must be >= 1");
    map.validate();
    SampleBatch batch{n, x.size(), Vec(n * x.size()), step};
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < x.size(); ++i)
            batch.values[j * x.size() + i] = map.mu_scale * x[i] + map.sigma * gauss(rng);
    return batch;
}

Vec expected_gradient(const GaussianLocationMap& map, const Loss& loss, std::span<const double> x,
                      std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("expected_gradient: x and y dimensions differ");
    // Both families are affine in z, so the gradient at E[z] is the expected gradient.
    const Vec mean_z = map.mean(y);
    return loss_gradient(loss, x, mean_z);
}

Vec batch_gradient(const Loss& loss, std::span<const double> x, const SampleBatch& batch) {
    if (batch.n == 0) throw InsufficientData("batch_gradient: empty batch");
    if (batch.d != x.size()) throw DimensionMismatch("batch_gradient: batch and x dimensions differ");
    Vec g(x.size(), 0.0);
    for (std::size_t j = 0; j < batch.n; ++j) {
        const Vec gj = loss_gradient(loss, x, batch.row(j));
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gj[i];
    }
    const double inv = 1.0 / static_cast<double>(batch.n);
    for (double& v : g) v *= inv;
    return g;
}

double w1_empirical_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InsufficientData("w1_empirical_1d: empty sample set");
    std::size_t n = std::min(a.size(), b.size());
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << "w1_empirical_1d: unequal sample counts " << a.size() << " and " << b.size() << ", truncating to "
           << n;
        warn(os.str());
    }
    Vec sa(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
    Vec sb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(sa[i] - sb[i]);
    return acc / static_cast<double>(n);
}

double w1_translation(const GaussianLocationMap& map, std::span<const double> x, std::span<const double> x_prime) {
    if (x.size() != x_prime.size()) throw DimensionMismatch("w1_translation: dimension mismatch");
    return map.sensitivity() * distance(x, x_prime);
}

double sensitivity_estimate(const GaussianLocationMap& map, std::span<const double> x,
                            std::span<const double> x_prime, std::size_t n, Rng& rng) {
    if (x.size() != x_prime.size()) throw DimensionMismatch("sensitivity_estimate: dimension mismatch");
    const double gap = distance(x, x_prime);
    if (gap == 0.0) throw DomainError("sensitivity_estimate: x and x' coincide");
    if (n < 1) throw DomainError("sensitivity_estimate: need at least one sample");

    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec noise(n), a(n), b(n);
    double shift_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) noise[j] = map.sigma * gauss(rng);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = map.mu_scale * x[i] + noise[j];
            b[j] = map.mu_scale * x_prime[i] + noise[j];
        }
        const double w = w1_empirical_1d(a, b);
        shift_sq += w * w;
    }
    return std::sqrt(shift_sq) / gap;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace ddtrack
