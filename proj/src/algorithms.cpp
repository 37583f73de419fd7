#include "ddtrack/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddtrack/errors.hpp"
#include "ddtrack/projection.hpp"

namespace ddtrack {

std::string_view to_string(GradientMode mode) {
    switch (mode) {
        case GradientMode::exact: return "exact";
        case GradientMode::greedy: return "greedy";
        case GradientMode::lazy: return "lazy";
    }
    return "unknown";
}

AlgorithmConfig AlgorithmConfig::constant(std::size_t horizon, double eta, GradientMode mode, std::size_t batch) {
    return {Vec(horizon, eta), std::vector<std::size_t>(horizon, batch), mode};
}

void AlgorithmConfig::validate(std::size_t horizon) const {
    if (step_sizes.size() != horizon) throw InvalidConstants("algorithm: step sizes must cover the horizon");
    for (double eta : step_sizes)
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidConstants("algorithm: step sizes must be positive");
    if (mode == GradientMode::exact) return;
    if (batch_sizes.size() != horizon) throw InvalidConstants("algorithm: batch sizes must cover the horizon");
    for (std::size_t n : batch_sizes) {
        if (n < 1) throw InvalidConstants("algorithm: batch sizes must be >= 1");
        if (mode == GradientMode::greedy && n != 1) throw InvalidConstants("algorithm: greedy mode requires N_t = 1");
    }
}

Vec opgd_step(std::span<const double> x, std::span<const double> grad, const ConstraintSet& set, double eta) {
    if (!(eta > 0.0)) throw DomainError("opgd_step: eta must be positive");
    if (x.size() != grad.size()) throw DimensionMismatch("opgd_step: x and gradient dimensions differ");
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - eta * grad[i];
    return project(set, y);
}

OspgdStep ospgd_step(std::span<const double> x, const SampleBatch& batch, const Loss& loss,
                     const GaussianLocationMap& map, const ConstraintSet& set, double eta) {
    if (batch.n == 0) throw InsufficientData("ospgd_step: empty batch");
    const Vec g = batch_gradient(loss, x, batch);
    const Vec exact = expected_gradient(map, loss, x, x);
    return {opgd_step(x, g, set, eta), distance(g, exact)};
}

StepSizeInterval step_size_interval(double alpha, double beta, double eps, double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("step_size_interval: r must lie in (0, 1)");
    if (!(alpha > 0.0) || alpha > beta) throw DomainError("step_size_interval: requires 0 < alpha <= beta");
    if (!(eps >= 0.0)) throw DomainError("step_size_interval: eps must be >= 0");
    const StepSizeInterval iv{(1.0 - r) / (alpha + beta * eps), (1.0 + r) / (beta * (1.0 + eps))};
    if (iv.lo > iv.hi) {
        std::ostringstream os;
        os << "step_size_interval: r = " << r << " gives an empty interval [" << iv.lo << ", " << iv.hi << "]";
        throw InfeasibleStepSize(os.str());
    }
    return iv;
}

StepSizeInterval contractive_step_size_interval(double alpha, double beta, double eps, double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("contractive_step_size_interval: r must lie in (0, 1)");
    if (!(alpha > 0.0) || alpha > beta) throw DomainError("contractive_step_size_interval: requires 0 < alpha <= beta");
    if (!(beta * eps < alpha)) throw NotContractive("contractive_step_size_interval: requires beta eps < alpha");
    // |1 - eta a| + eta b eps <= r for a in {alpha, beta}; alpha <= beta
    // makes the alpha lower end and the beta upper end binding.
    const StepSizeInterval iv{(1.0 - r) / (alpha - beta * eps), (1.0 + r) / (beta * (1.0 + eps))};
    if (iv.lo > iv.hi) {
        std::ostringstream os;
        os << "contractive_step_size_interval: no step reaches lambda <= " << r;
        throw InfeasibleStepSize(os.str());
    }
    return iv;
}

ContractionFactor contraction_factor(double alpha, double beta, double eps, double eta) {
    const double rho = std::max(std::abs(1.0 - eta * alpha), std::abs(1.0 - eta * beta));
    const double lambda = rho + eta * beta * eps;
    return {rho, lambda, lambda < 1.0};
}

Vec algorithmic_map(const ProblemInstance& problem, std::size_t t, std::span<const double> x,
                    std::span<const double> y, double eta) {
    const Vec grad = expected_gradient(problem.map(t), problem.loss(t), x, y);
    return opgd_step(x, grad, problem.constraint(t), eta);
}

Vec solve_stable_point(const ProblemInstance& problem, std::size_t t, const StablePointOptions& options) {
    const auto& c = problem.derived_constants();
    const double alpha = c.alpha.at(t), beta = c.beta.at(t), eps = c.eps.at(t);
    const double eta = options.eta.value_or(2.0 / (alpha + beta));
    const auto factor = contraction_factor(alpha, beta, eps, eta);
    if (!factor.contractive) {
        std::ostringstream os;
        os << "solve_stable_point: lambda = " << factor.lambda << " >= 1 at step " << t << " (eta = " << eta << ")";
        throw NotContractive(os.str());
    }

    Vec x = options.start.value_or(Vec(problem.dimension(), 0.0));
    if (x.size() != problem.dimension()) throw DimensionMismatch("solve_stable_point: start has wrong dimension");
    x = project(problem.constraint(t), x);
    for (std::size_t k = 0; k < options.max_iter; ++k) {
        Vec next = algorithmic_map(problem, t, x, x, eta);
        const double residual = distance(next, x);
        x = std::move(next);
        if (residual <= options.tol) return x;
    }
    throw ConvergenceError("solve_stable_point: no convergence within " + std::to_string(options.max_iter) +
                           " iterations at step " + std::to_string(t));
}

Vec kkt_stable_point_ev(std::span<const double> gamma, double kappa, double mu, double capacity, bool nonneg) {
    if (!(capacity > 0.0)) throw DomainError("kkt_stable_point_ev: capacity must be positive");
    const double curv = mu + 2.0 * kappa;
    if (!(curv > 0.0)) throw DomainError("kkt_stable_point_ev: mu + 2 kappa must be positive");

    auto point = [&](double m) {
        Vec x(gamma.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = (gamma[i] - m) / curv;
            if (nonneg) x[i] = std::max(0.0, x[i]);
        }
        return x;
    };
    auto residual = [&](double m) { return sum(point(m)) - capacity; };

    if (residual(0.0) <= 0.0) return point(0.0);

    // residual is nonincreasing in m; bracket the root, then bisect
    double lo = 0.0, hi = 1.0;
    while (residual(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (r > 0.0) lo = mid;
        else hi = mid;
        if (std::abs(residual(hi)) <= 1e-12 || hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    // hi is on the feasible side of the budget
    return point(hi);
}

std::vector<Vec> stable_point_path(const ProblemInstance& problem) {
    std::vector<Vec> path;
    path.reserve(problem.horizon());
    for (std::size_t t = 0; t < problem.horizon(); ++t) {
        const auto* q = std::get_if<QuadraticSeparableLoss>(&problem.loss(t));
        const bool homogeneous =
            q && std::all_of(q->kappa.begin(), q->kappa.end(), [&](double k) { return k == q->kappa.front(); });
        const auto& set = problem.constraint(t);
        if (homogeneous && std::holds_alternative<BudgetHalfspace>(set)) {
            path.push_back(kkt_stable_point_ev(q->gamma, q->kappa.front(), problem.map(t).mu_scale,
                                               std::get<BudgetHalfspace>(set).capacity));
        } else if (homogeneous && std::holds_alternative<NonnegBudget>(set) &&
                   std::get<NonnegBudget>(set).capacity > 0.0) {
            path.push_back(kkt_stable_point_ev(q->gamma, q->kappa.front(), problem.map(t).mu_scale,
                                               std::get<NonnegBudget>(set).capacity, true));
        } else {
            StablePointOptions opts;
            if (!path.empty()) opts.start = path.back();
            path.push_back(solve_stable_point(problem, t, opts));
        }
    }
    return path;
}

RunRecord run_online(const ProblemInstance& problem, const AlgorithmConfig& config, std::span<const double> x0,
                     const std::vector<Vec>& stable_points, Rng* rng, std::uint64_t seed) {
    const std::size_t T = problem.horizon();
    config.validate(T);
    if (x0.size() != problem.dimension()) throw DimensionMismatch("run_online: x0 has wrong dimension");
    if (stable_points.size() != T) throw InvalidConstants("run_online: stable-point path must cover the horizon");
    if (config.mode != GradientMode::exact && rng == nullptr)
        throw InvalidConstants("run_online: stochastic modes need a generator");

    RunRecord rec;
    rec.seed = seed;
    rec.iterates.reserve(T);
    rec.tracking_error.reserve(T);
    rec.drift.reserve(T - 1);
    rec.grad_error.reserve(T - 1);

    Vec x(x0.begin(), x0.end());
    for (std::size_t t = 0; t < T; ++t) {
        rec.tracking_error.push_back(distance(x, stable_points[t]));
        rec.iterates.push_back(x);
        if (t + 1 == T) break;

        rec.drift.push_back(distance(stable_points[t + 1], stable_points[t]));
        const double eta = config.step_sizes[t];
        if (config.mode == GradientMode::exact) {
            x = algorithmic_map(problem, t, x, x, eta);
            rec.grad_error.push_back(0.0);
        } else {
            const SampleBatch batch = sample(problem.map(t), x, config.batch_sizes[t], *rng, t);
            auto step = ospgd_step(x, batch, problem.loss(t), problem.map(t), problem.constraint(t), eta);
            x = std::move(step.x_next);
            rec.grad_error.push_back(step.xi);
        }
    }
    return rec;
}

}  // namespace ddtrack
