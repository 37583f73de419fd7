#include "ddtrack/projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ddtrack/errors.hpp"

namespace ddtrack {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dimension(std::size_t expected, std::size_t got) {
    if (expected != got) {
        std::ostringstream os;
        os << "dimension mismatch: set has dimension " << expected << ", vector has " << got;
        throw DimensionMismatch(os.str());
    }
}

}  // namespace

void validate(const ConstraintSet& set) {
    std::visit(Overloaded{
                   [](const FullSpace&) {},
                   [](const Box& b) {
                       if (b.lo.size() != b.hi.size())
                           throw InvalidConstants("box: lo and hi differ in length");
                       if (b.lo.empty()) throw InvalidConstants("box: empty bounds");
                       for (std::size_t i = 0; i < b.lo.size(); ++i) {
                           if (std::isnan(b.lo[i]) || std::isnan(b.hi[i]))
                               throw InvalidConstants("box: NaN bound");
                           if (b.hi[i] < b.lo[i])
                               throw InvalidConstants("box: hi < lo at coordinate " + std::to_string(i));
                       }
                   },
                   [](const EuclideanBall& b) {
                       if (b.center.empty()) throw InvalidConstants("ball: empty center");
                       if (!all_finite(b.center)) throw InvalidConstants("ball: non-finite center");
                       if (!(b.radius > 0.0) || !std::isfinite(b.radius))
                           throw InvalidConstants("ball: radius must be positive and finite");
                   },
                   [](const BudgetHalfspace& b) {
                       if (!std::isfinite(b.capacity))
                           throw InvalidConstants("budget: capacity must be finite");
                   },
                   [](const NonnegBudget& b) {
                       if (!std::isfinite(b.capacity) || b.capacity < 0.0)
                           throw InvalidConstants("nonneg budget: capacity must be finite and >= 0");
                   },
               },
               set);
}

std::optional<std::size_t> intrinsic_dimension(const ConstraintSet& set) {
    if (auto* b = std::get_if<Box>(&set)) return b->lo.size();
    if (auto* b = std::get_if<EuclideanBall>(&set)) return b->center.size();
    return std::nullopt;
}

bool contains(const ConstraintSet& set, std::span<const double> x, double tol) {
    if (auto dim = intrinsic_dimension(set); dim && *dim != x.size()) return false;
    return std::visit(Overloaded{
                          [](const FullSpace&) { return true; },
                          [&](const Box& b) {
                              for (std::size_t i = 0; i < x.size(); ++i)
                                  if (x[i] < b.lo[i] - tol || x[i] > b.hi[i] + tol) return false;
                              return true;
                          },
                          [&](const EuclideanBall& b) { return distance(x, b.center) <= b.radius + tol; },
                          [&](const BudgetHalfspace& b) { return sum(x) <= b.capacity + tol; },
                          [&](const NonnegBudget& b) {
                              for (double v : x)
                                  if (v < -tol) return false;
                              return sum(x) <= b.capacity + tol;
                          },
                      },
                      set);
}

double max_norm(const ConstraintSet& set) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(Overloaded{
                          [](const FullSpace&) { return inf; },
                          [](const Box& b) {
                              double s = 0.0;
                              for (std::size_t i = 0; i < b.lo.size(); ++i) {
                                  const double m = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
                                  s += m * m;
                              }
                              return std::sqrt(s);
                          },
                          [](const EuclideanBall& b) { return norm(b.center) + b.radius; },
                          [](const BudgetHalfspace&) { return inf; },
                          // the simplex vertices c*e_i are the farthest points
                          [](const NonnegBudget& b) { return b.capacity; },
                      },
                      set);
}

std::string describe(const ConstraintSet& set) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const FullSpace&) { os << "full-space"; },
                   [&](const Box& b) { os << "box(d=" << b.lo.size() << ")"; },
                   [&](const EuclideanBall& b) { os << "ball(d=" << b.center.size() << ", r=" << b.radius << ")"; },
                   [&](const BudgetHalfspace& b) { os << "budget-halfspace(c=" << b.capacity << ")"; },
                   [&](const NonnegBudget& b) { os << "nonneg-budget(c=" << b.capacity << ")"; },
               },
               set);
    return os.str();
}

Vec project_nonneg_budget(std::span<const double> y, double capacity) {
    Vec out(y.size());
    double positive_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = std::max(0.0, y[i]);
        positive_sum += out[i];
    }
    if (positive_sum <= capacity) return out;
    if (capacity <= 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }

    // Threshold lambda > 0 with sum_i max(0, y_i - lambda) = capacity.
    Vec sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0;
    double lambda = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        prefix += sorted[k];
        const double candidate = (prefix - capacity) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) lambda = candidate;
        else break;
    }
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::max(0.0, y[i] - lambda);
    return out;
}

Vec project(const ConstraintSet& set, std::span<const double> y) {
    if (!all_finite(y)) throw NonFiniteInput("project: non-finite input vector");
    if (auto dim = intrinsic_dimension(set)) require_dimension(*dim, y.size());

    return std::visit(Overloaded{
                          [&](const FullSpace&) { return Vec(y.begin(), y.end()); },
                          [&](const Box& b) {
                              Vec out(y.size());
                              for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::clamp(y[i], b.lo[i], b.hi[i]);
                              return out;
                          },
                          [&](const EuclideanBall& b) {
                              Vec out(y.begin(), y.end());
                              const double r = distance(y, b.center);
                              if (r <= b.radius) return out;
                              const double scale = b.radius / r;
                              for (std::size_t i = 0; i < y.size(); ++i)
                                  out[i] = b.center[i] + scale * (y[i] - b.center[i]);
                              return out;
                          },
                          [&](const BudgetHalfspace& b) {
                              Vec out(y.begin(), y.end());
                              if (y.empty()) return out;
                              const double excess = (sum(y) - b.capacity) / static_cast<double>(y.size());
                              if (excess > 0.0)
                                  for (double& v : out) v -= excess;
                              return out;
                          },
                          [&](const NonnegBudget& b) { return project_nonneg_budget(y, b.capacity); },
                      },
                      set);
}

}  // namespace ddtrack
