#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ddtrack/distmap.hpp"
#include "ddtrack/problem.hpp"

namespace ddtrack {

enum class GradientMode {
    exact,   // closed-form expected gradient at the induced distribution
    greedy,  // one sample per step
    lazy,    // N_t > 1 samples per step
};

std::string_view to_string(GradientMode mode);

struct AlgorithmConfig {
    Vec step_sizes;                        // eta_t > 0
    std::vector<std::size_t> batch_sizes;  // N_t, ignored in exact mode
    GradientMode mode = GradientMode::exact;

    static AlgorithmConfig constant(std::size_t horizon, double eta, GradientMode mode, std::size_t batch = 1);

    // Throws InvalidConstants on wrong lengths, eta <= 0, N < 1, or greedy with N != 1.
    void validate(std::size_t horizon) const;
};

/// One online run over the horizon T.
///
/// iterates and tracking_error have T entries (x_0 .. x_{T-1});
/// drift and grad_error have T-1 entries, one per transition t -> t+1.
struct RunRecord {
    std::vector<Vec> iterates;
    Vec tracking_error;  // e_t = ||x_t - xbar_t||
    Vec drift;           // phi_t = ||xbar_{t+1} - xbar_t||
    Vec grad_error;      // xi_t = ||g_t(x_t) - grad f_t(x_t, D_t(x_t))||, zero in exact mode
    std::uint64_t seed = 0;
};

// proj_C(x - eta * grad)
Vec opgd_step(std::span<const double> x, std::span<const double> grad, const ConstraintSet& set, double eta);

struct OspgdStep {
    Vec x_next;
    double xi;  // gradient error against the induced distribution at x
};

/// Mini-batch projected step. The batch must have been drawn at x; the
/// gradient error is measured against the expected gradient at (x, x).
OspgdStep ospgd_step(std::span<const double> x, const SampleBatch& batch, const Loss& loss,
                     const GaussianLocationMap& map, const ConstraintSet& set, double eta);

struct StepSizeInterval {
    double lo;
    double hi;
};

/// [(1-r)/(alpha + beta eps), (1+r)/(beta (1+eps))].
///
/// Throws DomainError for r outside (0,1) or alpha > beta, and
/// InfeasibleStepSize when lo > hi.
/// For eps > 0 a step inside this interval does not by itself imply
/// lambda <= r; see contractive_step_size_interval.
StepSizeInterval step_size_interval(double alpha, double beta, double eps, double r);

// Exact set of step sizes with rho + eta beta eps <= r:
// [(1-r)/(alpha - beta eps), (1+r)/(beta (1+eps))]. Requires beta eps < alpha.
StepSizeInterval contractive_step_size_interval(double alpha, double beta, double eps, double r);

struct ContractionFactor {
    double rho;     // max(|1 - eta alpha|, |1 - eta beta|)
    double lambda;  // rho + eta beta eps
    bool contractive;
};

ContractionFactor contraction_factor(double alpha, double beta, double eps, double eta);

// G_t(x, D_t(y)) = proj_{C_t}(x - eta grad f_t(x, D_t(y))).
Vec algorithmic_map(const ProblemInstance& problem, std::size_t t, std::span<const double> x,
                    std::span<const double> y, double eta);

struct StablePointOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    // Defaults to 2 / (alpha_t + beta_t) with the derived constants, for which
    // lambda < 1 exactly when eps beta / alpha < 1.
    std::optional<double> eta;
    std::optional<Vec> start;
};

/// Fixed-point iteration x <- G_t(x, D_t(x)) on the frozen step-t problem.
///
/// Returns xbar with ||G_t(xbar, D_t(xbar)) - xbar|| <= tol. Throws
/// NotContractive when lambda_t >= 1 at the chosen step and
/// ConvergenceError after max_iter iterations.
Vec solve_stable_point(const ProblemInstance& problem, std::size_t t, const StablePointOptions& options = {});

/// Stable point of the separable charging problem over a budget set.
///
/// xbar_i = (gamma_i - m) / (mu + 2 kappa), where the multiplier m is zero
/// when the budget is slack and otherwise found by bisection so that the
/// budget binds. With nonneg the coordinates are clamped at zero first.
/// Throws DomainError when capacity <= 0 or mu + 2 kappa <= 0.
Vec kkt_stable_point_ev(std::span<const double> gamma, double kappa, double mu, double capacity,
                        bool nonneg = false);

// Stable points for every step, closed form when the step is a homogeneous
// charging problem on a budget set, fixed-point iteration otherwise.
std::vector<Vec> stable_point_path(const ProblemInstance& problem);

/// Runs OPGD (exact mode) or OSPGD (greedy/lazy) from x0 against the given
/// stable-point path. rng may be null in exact mode.
RunRecord run_online(const ProblemInstance& problem, const AlgorithmConfig& config, std::span<const double> x0,
                     const std::vector<Vec>& stable_points, Rng* rng, std::uint64_t seed = 0);

}  // namespace ddtrack
