#pragma once

#include "ddtrack/problem.hpp"
#include "ddtrack/vec.hpp"

namespace ddtrack {

// Sequences all have length n (one entry per transition); envelopes have
// n + 1 entries, the first being e0.
struct BoundInputs {
    Vec lambda;   // contraction factors lambda_t
    Vec phi;      // drifts phi_t
    double e0 = 0.0;
    Vec eta;      // step sizes
    Vec xi_mean;  // E[xi_t]
    double theta = 0.5;
    Vec nu;       // sub-Weibull proxy variance of xi_t
    double delta = 0.1;
};

/// Deterministic envelope
///   bound_{t+1} = (prod_{i=0}^{t} lambda_i) e0 + sum_{i=0}^{t} b_i phi_i,
///   b_t = 1, b_i = prod_{k=i+1}^{t} lambda_k.
/// Products start at i = 0, matching the unrolled one-step recursion.
Vec opgd_envelope(const BoundInputs& in);

// Same structure with phi_i replaced by phi_i + eta_i E[xi_i].
Vec ospgd_expectation_envelope(const BoundInputs& in);

// (2e/theta)^theta log^theta(2/delta) * (a_t e0 + sum b_i (phi_i + eta_i nu_i)).
Vec ospgd_hp_envelope(const BoundInputs& in);

// Expectation envelope divided by delta.
Vec markov_envelope(const BoundInputs& in);

// phiTilde / (1 - lambdaTilde); throws DomainError unless 0 <= lambdaTilde < 1.
double limsup_bound(double lambda_tilde, double phi_tilde);

// 2 eps gamma / alpha; throws DomainError for alpha <= 0.
double stable_optimum_gap(double eps, double gamma_lip, double alpha);

// lambda_t = rho_t + eta_t beta_t eps_t for the first `count` steps.
Vec lambda_sequence(const RegularityConstants& constants, std::span<const double> eta, std::size_t count);

}  // namespace ddtrack
