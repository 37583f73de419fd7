#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ddtrack/constraint_set.hpp"
#include "ddtrack/distmap.hpp"
#include "ddtrack/loss.hpp"

namespace ddtrack {

/// Per-step regularity constants of a time-varying problem.
///
/// alpha: strong convexity of x -> l_t(x, z).
/// beta: one modulus for both Lipschitz conditions on grad_x l_t (in x and in z).
/// eps: Wasserstein-1 sensitivity of the distributional map.
/// gamma_lip: Lipschitz constant of z -> l_t(x, z); only used by the
/// stable/optimal gap and may be +inf.
struct RegularityConstants {
    Vec alpha;
    Vec beta;
    Vec eps;
    Vec gamma_lip;

    [[nodiscard]] std::size_t horizon() const { return alpha.size(); }

    // Throws InvalidConstants on length mismatch, alpha <= 0, beta < alpha, eps < 0.
    void validate() const;
};

struct ContractionReport {
    Vec ratio;              // eps_t * beta_t / alpha_t
    std::vector<bool> ok;   // ratio_t < 1
    bool all_ok = true;
};

ContractionReport validate_contraction(const RegularityConstants& constants);

// The scalar family l = x^2 + z, D(x) = N(mu x, sigma^2), on the real line.
struct Example1ClosedForms {
    double performative_optimum;  // -mu/2
    double stable_point;          // 0
    double gap_bound;             // 2 eps gamma / alpha with eps = mu, gamma = 1, alpha = 2
};

Example1ClosedForms example1_closed_forms(double mu);

/// A time-varying stochastic problem with decision-dependent data:
/// per step a loss, a closed convex feasible set, a Gaussian location map
/// and the constants the bounds are evaluated with.
///
/// Immutable after construction.
class ProblemInstance {
public:
    // Throws on inconsistent horizons or dimensions. When `constants` is
    // empty the Hessian-derived values are used; when given and different
    // from the derived ones a warning is emitted.
    ProblemInstance(std::size_t dimension, std::vector<Loss> losses, std::vector<ConstraintSet> constraints,
                    std::vector<GaussianLocationMap> maps,
                    std::optional<RegularityConstants> constants = std::nullopt);

    [[nodiscard]] std::size_t horizon() const { return losses_.size(); }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] const Loss& loss(std::size_t t) const { return losses_.at(t); }
    [[nodiscard]] const ConstraintSet& constraint(std::size_t t) const { return constraints_.at(t); }
    [[nodiscard]] const GaussianLocationMap& map(std::size_t t) const { return maps_.at(t); }
    [[nodiscard]] const RegularityConstants& constants() const { return constants_; }
    [[nodiscard]] const RegularityConstants& derived_constants() const { return derived_; }

    // The same instance with other constants (no mismatch warning).
    [[nodiscard]] ProblemInstance with_constants(RegularityConstants constants) const;

private:
    ProblemInstance() = default;

    std::size_t dimension_ = 0;
    std::vector<Loss> losses_;
    std::vector<ConstraintSet> constraints_;
    std::vector<GaussianLocationMap> maps_;
    RegularityConstants constants_;
    RegularityConstants derived_;
};

/// Constants read off the loss family: alpha and beta-in-x are the extreme
/// Hessian eigenvalues, beta covers the z-Lipschitz constant as well, eps is
/// |mu_t|, gamma_lip is sup ||x|| over the set (quadratic family) or sqrt(d)
/// (Example 1 family).
RegularityConstants derive_constants(std::size_t dimension, const std::vector<Loss>& losses,
                                     const std::vector<ConstraintSet>& constraints,
                                     const std::vector<GaussianLocationMap>& maps);

// Builds an instance from the documented JSON schema (see README).
ProblemInstance parse_problem(const nlohmann::json& config);
ProblemInstance load_problem(const std::filesystem::path& path);

}  // namespace ddtrack
