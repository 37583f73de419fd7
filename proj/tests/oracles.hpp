#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// these oracles are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Membership = std::function<bool(const Vec&)>;

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// Closest feasible grid point to y. Coarse-to-fine: each level scans a
// (2K+1)^d block of multiples of h around the previous best point, then h
// shrinks tenfold until it reaches `resolution`. `start` must be feasible;
// the first level covers a ball around y that contains the projection.
inline Vec grid_project(const Membership& inside, const Vec& y, const Vec& start, double resolution = 1e-3,
                        int K = 25) {
    const std::size_t d = y.size();
    const double reach = std::sqrt(dist2(y, start)) + 1e-9;
    double h = resolution;
    while (h * K < 2.0 * reach) h *= 10.0;

    Vec best = start;
    double best_d = dist2(y, start);
    Vec center = y;
    while (true) {
        Vec snapped(d);
        for (std::size_t i = 0; i < d; ++i) snapped[i] = std::round(center[i] / h) * h;
        std::vector<int> k(d, -K);
        Vec p(d);
        while (true) {
            for (std::size_t i = 0; i < d; ++i) p[i] = snapped[i] + k[i] * h;
            if (inside(p)) {
                const double dd = dist2(y, p);
                if (dd < best_d) {
                    best_d = dd;
                    best = p;
                }
            }
            std::size_t i = 0;
            while (i < d && ++k[i] > K) k[i++] = -K;
            if (i == d) break;
        }
        if (h <= resolution * 1.0000001) break;
        center = best;
        h /= 10.0;
    }
    return best;
}

// Minimises f over the lattice lo + m * step inside [lo, hi], coarse-to-fine
// like grid_project but in an arbitrary parameter box. Coordinates flagged
// periodic are not clipped to the box (f must be periodic in them).
inline Vec grid_minimize(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi, const Vec& step,
                         std::vector<bool> periodic = {}, int K = 25) {
    const std::size_t d = lo.size();
    periodic.resize(d, false);
    Vec h = step;
    auto covers = [&] {
        for (std::size_t i = 0; i < d; ++i)
            if (2.0 * K * h[i] < hi[i] - lo[i]) return false;
        return true;
    };
    int levels = 0;
    while (!covers()) {
        for (auto& v : h) v *= 10.0;
        ++levels;
    }
    Vec center(d), best(d);
    for (std::size_t i = 0; i < d; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
    double best_f = std::numeric_limits<double>::infinity();
    for (int level = levels; level >= 0; --level) {
        std::vector<int> k(d, -K);
        Vec p(d);
        while (true) {
            bool ok = true;
            for (std::size_t i = 0; i < d; ++i) {
                p[i] = lo[i] + (std::round((center[i] - lo[i]) / h[i]) + k[i]) * h[i];
                ok = ok && (periodic[i] || (p[i] >= lo[i] - 1e-12 && p[i] <= hi[i] + 1e-12));
            }
            if (ok) {
                const double v = f(p);
                if (v < best_f) {
                    best_f = v;
                    best = p;
                }
            }
            std::size_t i = 0;
            while (i < d && ++k[i] > K) k[i++] = -K;
            if (i == d) break;
        }
        center = best;
        for (auto& v : h) v /= 10.0;
    }
    return best;
}

// Projection onto a ball by grid search in polar coordinates (d <= 3). The
// outer radius lies on the grid, so boundary points are represented exactly;
// spacing is `resolution` radially and along the boundary. The radius may be
// negative and angles wrap, so the refinement never gets pinned at a seam or
// at the origin.
inline Vec grid_project_ball(const Vec& center, double radius, const Vec& y, double resolution = 1e-3) {
    const std::size_t d = y.size();
    constexpr double pi = std::numbers::pi;
    auto point = [&](const Vec& q) {
        Vec p = center;
        if (d == 1) {
            p[0] += q[0];
        } else if (d == 2) {
            p[0] += q[0] * std::cos(q[1]);
            p[1] += q[0] * std::sin(q[1]);
        } else {
            p[0] += q[0] * std::sin(q[1]) * std::cos(q[2]);
            p[1] += q[0] * std::sin(q[1]) * std::sin(q[2]);
            p[2] += q[0] * std::cos(q[1]);
        }
        return p;
    };
    const double da = resolution / radius;
    Vec lo, hi, step;
    if (d == 1) {
        lo = {-radius};
        hi = {radius};
        step = {resolution};
    } else if (d == 2) {
        lo = {-radius, -pi};
        hi = {radius, pi};
        step = {resolution, da};
    } else {
        lo = {-radius, -pi, -pi};
        hi = {radius, pi, pi};
        step = {resolution, da, da};
    }
    std::vector<bool> periodic(d, true);
    periodic[0] = false;
    return point(grid_minimize([&](const Vec& q) { return dist2(point(q), y); }, lo, hi, step, periodic));
}

// E|Z|^k for Z ~ N(0, 1).
inline double gaussian_abs_moment(int k) {
    return std::pow(2.0, k / 2.0) * std::tgamma((k + 1) / 2.0) / std::sqrt(std::numbers::pi);
}

// e_{t+1} <= lambda_t e_t + w_t, unrolled by plain recursion.
inline Vec recursive_envelope(const Vec& lambda, const Vec& w, double e0) {
    Vec out{e0};
    for (std::size_t t = 0; t < lambda.size(); ++t) out.push_back(lambda[t] * out.back() + w[t]);
    return out;
}

}  // namespace oracle
