#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddtrack/algorithms.hpp"
#include "ddtrack/bounds.hpp"
#include "ddtrack/problem.hpp"

namespace ddtrack {

enum class ConstantsSource {
    derived,  // alpha = beta = 2 kappa structure read off the Hessian, eps = mu
    stated,   // alpha = beta = 2 as quoted for the charging experiment, eps = mu
};

/// Fleet-charging scenario: d stations, T five-minute steps, budget c_t,
/// loss sum z_i x_i - gamma_t x_i + kappa x_i^2 with z_i ~ N(mu_t x_i, sigma^2).
struct ScenarioConfig {
    std::size_t stations = 10;
    std::size_t horizon = 100;
    double capacity = 10.0;
    double kappa = 2.0;
    // gamma_t = 1 - |t - 50| / 100
    nlohmann::json gamma = {{"type", "piecewise-linear"}, {"knots", {{0, 0.5}, {50, 1.0}, {100, 0.5}}}};
    std::optional<std::filesystem::path> price_file;  // synthetic prices when empty
    double sigma = 1.0;
    double eta = 0.3;
    double x0_radius = 5.0;
    std::size_t replications = 1000;
    std::size_t lazy_batch = 10;
    std::uint64_t seed = 2022;
    ConstantsSource constants = ConstantsSource::derived;
    double stated_alpha = 2.0;
    double stated_beta = 2.0;
    bool nonneg = false;  // x >= 0 on top of the budget
    double theta = 0.5;   // tail exponent used when fitting xi
    double delta = 0.1;

    void validate() const;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Smooth daily-shaped price curve plus seeded noise, clamped to
/// [0.01, 0.09] $/kWh. Deterministic per seed.
Vec synth_price_series(std::size_t T, std::uint64_t seed);

/// First T values of a one-column price CSV (optional header
/// "price_usd_per_kwh"). Throws ParseError naming the offending row,
/// InsufficientData when fewer than T rows, DomainError on negative prices.
Vec load_price_series(const std::filesystem::path& path, std::size_t T);

// Uniform on the sphere of the given radius: normalised Gaussian direction.
Vec sample_sphere(double radius, std::size_t d, Rng& rng);

// Price path used by a scenario: the CSV when configured, synthetic otherwise.
Vec scenario_prices(const ScenarioConfig& config);

ProblemInstance build_ev_problem(const ScenarioConfig& config, const Vec& prices);

// Per-mode Monte Carlo aggregates. Vectors of length T are indexed by step;
// xi statistics have T - 1 entries (one per transition).
struct ModeSummary {
    GradientMode mode = GradientMode::exact;
    Vec mean_error;
    Vec stderr_error;
    Vec xi_mean;
    Vec xi_nu;
    bool xi_nu_pooled = false;  // fitted on all steps together (too few replications per step)
    Vec env_expectation;
    Vec env_hp;
    Vec env_markov;
    Vec hp_coverage;  // fraction of replications below their own high-probability envelope
    std::vector<Vec> errors;  // [replication][t]
};

struct ExperimentResult {
    std::size_t horizon = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    double wall_time_s = 0.0;
    nlohmann::json config_echo;

    Vec prices;
    std::vector<Vec> stable_points;
    Vec phi;       // length T, final entry 0 (no successor)
    Vec lambda;    // length T - 1
    Vec e0;        // per replication
    Vec env_opgd;  // evaluated at the mean e0
    ContractionReport contraction;
    std::vector<bool> envelope_valid;  // contraction ratio < 1 and lambda_t < 1
    std::size_t exact_domination_violations = 0;

    ModeSummary exact;
    ModeSummary greedy;
    ModeSummary lazy;
};

/// Monte Carlo over initial points on the sphere: every replication runs
/// exact, greedy and lazy gradients from the same x0 against closed-form
/// stable points, then all envelopes are evaluated with the measured
/// gradient-error statistics.
///
/// Replication r uses a generator seeded with split_seed(seed, r + 1); the
/// price series uses split_seed(seed, 0). Results are reduced in
/// replication order, so the output does not depend on `workers`.
ExperimentResult run_experiment(const ScenarioConfig& config, unsigned workers = 1);

// Config echo, seed, measured gradient-error statistics, wall time.
nlohmann::json result_metadata(const ExperimentResult& result);

struct ResultFiles {
    std::filesystem::path csv;
    std::filesystem::path metadata;
};

// Writes ev_result.csv and ev_metadata.json into out_dir (created if absent).
// Throws std::runtime_error when the directory or files cannot be written.
ResultFiles write_result_files(const ExperimentResult& result, const std::filesystem::path& out_dir);

// FNV-1a of the canonical JSON dump.
std::string config_hash(const nlohmann::json& config);

}  // namespace ddtrack
