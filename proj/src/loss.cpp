#include "ddtrack/loss.hpp"

#include <algorithm>
#include <sstream>

#include "ddtrack/errors.hpp"

namespace ddtrack {

namespace {

void check_sizes(const Loss& loss, std::size_t nx, std::size_t nz) {
    if (nx != nz) throw DimensionMismatch("loss: x and z dimensions differ");
    if (auto d = loss_dimension(loss); d && *d != nx) {
        std::ostringstream os;
        os << "loss: expected dimension " << *d << ", got " << nx;
        throw DimensionMismatch(os.str());
    }
}

}  // namespace

std::optional<std::size_t> loss_dimension(const Loss& loss) {
    if (auto* q = std::get_if<QuadraticSeparableLoss>(&loss)) return q->gamma.size();
    return std::nullopt;
}

void validate(const Loss& loss) {
    if (auto* q = std::get_if<QuadraticSeparableLoss>(&loss)) {
        if (q->gamma.size() != q->kappa.size() || q->gamma.empty())
            throw InvalidConstants("quadratic loss: gamma and kappa must be non-empty and equally sized");
        for (double k : q->kappa)
            if (!(k > 0.0)) throw InvalidConstants("quadratic loss: kappa must be positive");
        if (!all_finite(q->gamma)) throw InvalidConstants("quadratic loss: non-finite gamma");
    }
}

double loss_value(const Loss& loss, std::span<const double> x, std::span<const double> z) {
    check_sizes(loss, x.size(), z.size());
    double v = 0.0;
    if (auto* q = std::get_if<QuadraticSeparableLoss>(&loss)) {
        for (std::size_t i = 0; i < x.size(); ++i)
            v += z[i] * x[i] - q->gamma[i] * x[i] + q->kappa[i] * x[i] * x[i];
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) v += x[i] * x[i] + z[i];
    }
    return v;
}

Vec loss_gradient(const Loss& loss, std::span<const double> x, std::span<const double> z) {
    check_sizes(loss, x.size(), z.size());
    Vec g(x.size());
    if (auto* q = std::get_if<QuadraticSeparableLoss>(&loss)) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = z[i] - q->gamma[i] + 2.0 * q->kappa[i] * x[i];
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    }
    return g;
}

Vec hessian_diagonal(const Loss& loss, std::size_t d) {
    if (auto* q = std::get_if<QuadraticSeparableLoss>(&loss)) {
        if (q->kappa.size() != d) throw DimensionMismatch("hessian_diagonal: dimension mismatch");
        Vec h(d);
        for (std::size_t i = 0; i < d; ++i) h[i] = 2.0 * q->kappa[i];
        return h;
    }
    return Vec(d, 2.0);
}

LossCurvature curvature(const Loss& loss, std::size_t d) {
    const Vec h = hessian_diagonal(loss, d);
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    // z enters the quadratic family's gradient with unit coefficient and the
    // Example 1 gradient not at all
    const double zl = std::holds_alternative<QuadraticSeparableLoss>(loss) ? 1.0 : 0.0;
    return {*lo, *hi, zl};
}

}  // namespace ddtrack
