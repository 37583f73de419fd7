#include "ddtrack/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "ddtrack/csv.hpp"
#include "ddtrack/errors.hpp"
#include "ddtrack/sequence.hpp"
#include "ddtrack/subweibull.hpp"

namespace ddtrack {

void ScenarioConfig::validate() const {
    if (stations < 1) throw InvalidConstants("scenario: stations must be >= 1");
    if (horizon < 2) throw InvalidConstants("scenario: horizon must be >= 2");
    if (!(capacity > 0.0)) throw InvalidConstants("scenario: capacity must be positive");
    if (!(kappa > 0.0)) throw InvalidConstants("scenario: kappa must be positive");
    if (!(sigma > 0.0)) throw InvalidConstants("scenario: sigma must be positive");
    if (!(eta > 0.0)) throw InvalidConstants("scenario: eta must be positive");
    if (!(x0_radius > 0.0)) throw InvalidConstants("scenario: x0_radius must be positive");
    if (replications < 1) throw InvalidConstants("scenario: replications must be >= 1");
    if (lazy_batch < 2) throw InvalidConstants("scenario: lazy batch size must be >= 2");
    if (!(theta > 0.0)) throw InvalidConstants("scenario: theta must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidConstants("scenario: delta must lie in (0, 1)");
    if (constants == ConstantsSource::stated && (!(stated_alpha > 0.0) || stated_beta < stated_alpha))
        throw InvalidConstants("scenario: stated constants need 0 < alpha <= beta");
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("scenario: expected a JSON object");
    static const std::vector<std::string> known = {
        "stations", "horizon", "capacity", "kappa", "gamma", "price_file", "sigma", "eta", "x0_radius",
        "replications", "lazy_batch", "seed", "constants", "stated_alpha", "stated_beta", "nonneg", "theta", "delta"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError("scenario: unknown key \"" + key + "\"");

    ScenarioConfig c;
    try {
        c.stations = j.value("stations", c.stations);
        c.horizon = j.value("horizon", c.horizon);
        c.capacity = j.value("capacity", c.capacity);
        c.kappa = j.value("kappa", c.kappa);
        if (j.contains("gamma")) c.gamma = j.at("gamma");
        if (j.contains("price_file") && !j.at("price_file").is_null())
            c.price_file = j.at("price_file").get<std::string>();
        c.sigma = j.value("sigma", c.sigma);
        c.eta = j.value("eta", c.eta);
        c.x0_radius = j.value("x0_radius", c.x0_radius);
        c.replications = j.value("replications", c.replications);
        c.lazy_batch = j.value("lazy_batch", c.lazy_batch);
        c.seed = j.value("seed", c.seed);
        const auto source = j.value("constants", std::string("derived"));
        if (source == "derived") c.constants = ConstantsSource::derived;
        else if (source == "stated") c.constants = ConstantsSource::stated;
        else throw ParseError("scenario: constants must be \"derived\" or \"stated\"");
        c.stated_alpha = j.value("stated_alpha", c.stated_alpha);
        c.stated_beta = j.value("stated_beta", c.stated_beta);
        c.nonneg = j.value("nonneg", c.nonneg);
        c.theta = j.value("theta", c.theta);
        c.delta = j.value("delta", c.delta);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["stations"] = c.stations;
    j["horizon"] = c.horizon;
    j["capacity"] = c.capacity;
    j["kappa"] = c.kappa;
    j["gamma"] = c.gamma;
    j["price_file"] = c.price_file ? nlohmann::json(c.price_file->string()) : nlohmann::json(nullptr);
    j["sigma"] = c.sigma;
    j["eta"] = c.eta;
    j["x0_radius"] = c.x0_radius;
    j["replications"] = c.replications;
    j["lazy_batch"] = c.lazy_batch;
    j["seed"] = c.seed;
    j["constants"] = c.constants == ConstantsSource::derived ? "derived" : "stated";
    j["stated_alpha"] = c.stated_alpha;
    j["stated_beta"] = c.stated_beta;
    j["nonneg"] = c.nonneg;
    j["theta"] = c.theta;
    j["delta"] = c.delta;
    return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

Vec synth_price_series(std::size_t T, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec out(T);
    double noise = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        // one slow swing over ~8 hours of 5-minute steps plus a faster ripple
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 96.0;
        const double base = 0.05 - 0.018 * std::cos(phase) + 0.006 * std::sin(3.0 * phase);
        noise = 0.7 * noise + 0.004 * gauss(rng);
        out[t] = std::clamp(base + noise, 0.01, 0.09);
    }
    return out;
}

Vec load_price_series(const std::filesystem::path& path, std::size_t T) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open price file " + path.string());
    Vec values = read_value_column(in, std::string_view("price_usd_per_kwh"));
    if (values.size() < T)
        throw InsufficientData("price file " + path.string() + " has " + std::to_string(values.size()) +
                               " rows, need " + std::to_string(T));
    values.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        if (!(values[t] >= 0.0) || !std::isfinite(values[t]))
            throw DomainError("price file " + path.string() + ": negative or non-finite price at step " +
                              std::to_string(t));
    return values;
}

Vec sample_sphere(double radius, std::size_t d, Rng& rng) {
    if (!(radius > 0.0)) throw DomainError("sample_sphere: radius must be positive");
    if (d < 1) throw DomainError("sample_sphere: dimension must be >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(d);
    double n = 0.0;
    do {
        for (double& x : v) x = gauss(rng);
        n = norm(v);
    } while (n == 0.0);
    for (double& x : v) x *= radius / n;
    return v;
}

Vec scenario_prices(const ScenarioConfig& config) {
    if (config.price_file) return load_price_series(*config.price_file, config.horizon);
    return synth_price_series(config.horizon, split_seed(config.seed, 0));
}

ProblemInstance build_ev_problem(const ScenarioConfig& config, const Vec& prices) {
    config.validate();
    const std::size_t T = config.horizon, d = config.stations;
    if (prices.size() != T) throw DimensionMismatch("build_ev_problem: price series must have T entries");
    const Vec gamma = expand_sequence(config.gamma, T, "gamma");

    std::vector<Loss> losses;
    std::vector<ConstraintSet> sets;
    std::vector<GaussianLocationMap> maps;
    for (std::size_t t = 0; t < T; ++t) {
        losses.emplace_back(QuadraticSeparableLoss{Vec(d, gamma[t]), Vec(d, config.kappa)});
        if (config.nonneg) sets.emplace_back(NonnegBudget{config.capacity});
        else sets.emplace_back(BudgetHalfspace{config.capacity});
        maps.push_back({prices[t], config.sigma});
    }
    std::optional<RegularityConstants> constants;
    if (config.constants == ConstantsSource::stated) {
        RegularityConstants c{Vec(T, config.stated_alpha), Vec(T, config.stated_beta), Vec(T), {}};
        for (std::size_t t = 0; t < T; ++t) c.eps[t] = std::abs(prices[t]);
        constants = std::move(c);
    }
    return ProblemInstance(d, std::move(losses), std::move(sets), std::move(maps), std::move(constants));
}

std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

namespace {

struct Replication {
    double e0 = 0.0;
    RunRecord exact, greedy, lazy;
};

void mean_and_stderr(const std::vector<Vec>& rows, Vec& mean, Vec& se) {
    const std::size_t M = rows.size(), T = rows.front().size();
    mean.assign(T, 0.0);
    se.assign(T, 0.0);
    for (const auto& r : rows)
        for (std::size_t t = 0; t < T; ++t) mean[t] += r[t];
    for (double& m : mean) m /= static_cast<double>(M);
    if (M < 2) return;
    for (const auto& r : rows)
        for (std::size_t t = 0; t < T; ++t) se[t] += (r[t] - mean[t]) * (r[t] - mean[t]);
    for (double& s : se) s = std::sqrt(s / static_cast<double>(M - 1)) / std::sqrt(static_cast<double>(M));
}

void summarise_mode(ModeSummary& s, GradientMode mode, const std::vector<const RunRecord*>& runs,
                    const Vec& e0, double theta, double delta, const BoundInputs& base) {
    const std::size_t M = runs.size(), T = runs.front()->tracking_error.size();
    s.mode = mode;
    s.errors.reserve(M);
    for (const auto* r : runs) s.errors.push_back(r->tracking_error);
    mean_and_stderr(s.errors, s.mean_error, s.stderr_error);

    s.xi_mean.assign(T - 1, 0.0);
    s.xi_nu.assign(T - 1, 0.0);
    for (const auto* r : runs)
        for (std::size_t t = 0; t + 1 < T; ++t) s.xi_mean[t] += r->grad_error[t];
    for (double& v : s.xi_mean) v /= static_cast<double>(M);

    if (mode != GradientMode::exact) {
        if (M >= kMinFitSamples) {
            Vec column(M);
            for (std::size_t t = 0; t + 1 < T; ++t) {
                for (std::size_t r = 0; r < M; ++r) column[r] = runs[r]->grad_error[t];
                s.xi_nu[t] = fit_subweibull(column, theta).nu;
            }
        } else if (M * (T - 1) >= kMinFitSamples) {
            Vec pooled;
            for (const auto* r : runs) pooled.insert(pooled.end(), r->grad_error.begin(), r->grad_error.end());
            s.xi_nu.assign(T - 1, fit_subweibull(pooled, theta).nu);
            s.xi_nu_pooled = true;
        } else {
            s.xi_nu.assign(T - 1, std::numeric_limits<double>::quiet_NaN());
        }
    }

    double e0_mean = 0.0;
    for (double v : e0) e0_mean += v;
    e0_mean /= static_cast<double>(M);

    BoundInputs in = base;
    in.e0 = e0_mean;
    in.xi_mean = s.xi_mean;
    in.theta = theta;
    in.delta = delta;
    s.env_expectation = ospgd_expectation_envelope(in);
    s.env_markov = markov_envelope(in);

    const bool have_nu = std::all_of(s.xi_nu.begin(), s.xi_nu.end(), [](double v) { return std::isfinite(v); });
    if (!have_nu) {
        s.env_hp.assign(T, std::numeric_limits<double>::quiet_NaN());
        s.hp_coverage.assign(T, std::numeric_limits<double>::quiet_NaN());
        return;
    }
    in.nu = s.xi_nu;
    s.env_hp = ospgd_hp_envelope(in);

    // The envelope is affine in e0: evaluate once at e0 = 0 and add the
    // scaled contraction product per replication.
    BoundInputs zero = in;
    zero.e0 = 0.0;
    const Vec hp0 = ospgd_hp_envelope(zero);
    BoundInputs unit{base.lambda, Vec(T - 1, 0.0), 1.0, base.eta, Vec(T - 1, 0.0), theta, Vec(T - 1, 0.0), delta};
    const Vec a = ospgd_hp_envelope(unit);
    s.hp_coverage.assign(T, 0.0);
    for (std::size_t r = 0; r < M; ++r)
        for (std::size_t t = 0; t < T; ++t)
            if (s.errors[r][t] <= hp0[t] + a[t] * e0[r]) s.hp_coverage[t] += 1.0;
    for (double& c : s.hp_coverage) c /= static_cast<double>(M);
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& config, unsigned workers) {
    const auto started = std::chrono::steady_clock::now();
    config.validate();
    const std::size_t T = config.horizon, M = config.replications, d = config.stations;

    ExperimentResult res;
    res.horizon = T;
    res.replications = M;
    res.seed = config.seed;
    res.config_echo = to_json(config);
    res.config_hash = config_hash(res.config_echo);
    res.prices = scenario_prices(config);

    const ProblemInstance problem = build_ev_problem(config, res.prices);
    res.stable_points = stable_point_path(problem);
    res.phi.assign(T, 0.0);
    for (std::size_t t = 0; t + 1 < T; ++t) res.phi[t] = distance(res.stable_points[t + 1], res.stable_points[t]);

    const Vec eta(T, config.eta);
    res.lambda = lambda_sequence(problem.constants(), eta, T - 1);
    res.contraction = validate_contraction(problem.constants());
    res.envelope_valid.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        res.envelope_valid[t] = res.contraction.ok[t] && (t + 1 == T || res.lambda[t] < 1.0);

    const auto exact_cfg = AlgorithmConfig::constant(T, config.eta, GradientMode::exact);
    const auto greedy_cfg = AlgorithmConfig::constant(T, config.eta, GradientMode::greedy, 1);
    const auto lazy_cfg = AlgorithmConfig::constant(T, config.eta, GradientMode::lazy, config.lazy_batch);

    std::vector<Replication> reps(M);
    auto run_one = [&](std::size_t r) {
        const std::uint64_t seed = split_seed(config.seed, r + 1);
        Rng rng(seed);
        const Vec x0 = sample_sphere(config.x0_radius, d, rng);
        Replication& rep = reps[r];
        rep.exact = run_online(problem, exact_cfg, x0, res.stable_points, nullptr, seed);
        rep.greedy = run_online(problem, greedy_cfg, x0, res.stable_points, &rng, seed);
        rep.lazy = run_online(problem, lazy_cfg, x0, res.stable_points, &rng, seed);
        rep.e0 = rep.exact.tracking_error.front();
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(M)));
    if (n_workers == 1) {
        for (std::size_t r = 0; r < M; ++r) run_one(r);
    } else {
        std::vector<std::exception_ptr> failures(n_workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t r = w; r < M; r += n_workers) run_one(r);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& f : failures)
            if (f) std::rethrow_exception(f);
    }

    res.e0.resize(M);
    std::vector<const RunRecord*> exact_runs, greedy_runs, lazy_runs;
    for (std::size_t r = 0; r < M; ++r) {
        res.e0[r] = reps[r].e0;
        exact_runs.push_back(&reps[r].exact);
        greedy_runs.push_back(&reps[r].greedy);
        lazy_runs.push_back(&reps[r].lazy);
    }

    BoundInputs base;
    base.lambda = res.lambda;
    base.phi.assign(res.phi.begin(), res.phi.end() - 1);
    base.eta.assign(T - 1, config.eta);

    summarise_mode(res.exact, GradientMode::exact, exact_runs, res.e0, config.theta, config.delta, base);
    summarise_mode(res.greedy, GradientMode::greedy, greedy_runs, res.e0, config.theta, config.delta, base);
    summarise_mode(res.lazy, GradientMode::lazy, lazy_runs, res.e0, config.theta, config.delta, base);

    BoundInputs opgd = base;
    opgd.e0 = 0.0;
    const Vec env0 = opgd_envelope(opgd);
    opgd.phi.assign(T - 1, 0.0);
    opgd.e0 = 1.0;
    const Vec a = opgd_envelope(opgd);
    double e0_mean = 0.0;
    for (double v : res.e0) e0_mean += v;
    e0_mean /= static_cast<double>(M);
    res.env_opgd.resize(T);
    for (std::size_t t = 0; t < T; ++t) res.env_opgd[t] = env0[t] + a[t] * e0_mean;

    for (std::size_t r = 0; r < M; ++r) {
        const Vec& e = res.exact.errors[r];
        for (std::size_t t = 0; t < T; ++t) {
            if (e[t] > env0[t] + a[t] * res.e0[r] + 1e-9) {
                ++res.exact_domination_violations;
                break;
            }
        }
    }

    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

namespace {

nlohmann::json finite_or_null(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return arr;
}

nlohmann::json mode_metadata(const ModeSummary& s) {
    nlohmann::json j;
    j["xi_mean"] = finite_or_null(s.xi_mean);
    j["xi_nu"] = finite_or_null(s.xi_nu);
    j["xi_nu_pooled"] = s.xi_nu_pooled;
    j["env_expectation"] = finite_or_null(s.env_expectation);
    j["env_hp"] = finite_or_null(s.env_hp);
    j["env_markov"] = finite_or_null(s.env_markov);
    j["hp_coverage"] = finite_or_null(s.hp_coverage);
    j["stderr_error"] = finite_or_null(s.stderr_error);
    return j;
}

}  // namespace

nlohmann::json result_metadata(const ExperimentResult& r) {
    nlohmann::json j;
    j["config"] = r.config_echo;
    j["config_hash"] = r.config_hash;
    j["seed"] = r.seed;
    j["horizon"] = r.horizon;
    j["replications"] = r.replications;
    j["prices"] = finite_or_null(r.prices);
    j["lambda"] = finite_or_null(r.lambda);
    j["contraction_ratio"] = finite_or_null(r.contraction.ratio);
    j["contraction_ok"] = r.contraction.all_ok;
    j["envelope_valid"] = r.envelope_valid;
    j["exact_domination_violations"] = r.exact_domination_violations;
    j["greedy"] = mode_metadata(r.greedy);
    j["lazy"] = mode_metadata(r.lazy);
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

ResultFiles write_result_files(const ExperimentResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    ResultFiles files{out_dir / "ev_result.csv", out_dir / "ev_metadata.json"};
    {
        std::ofstream csv(files.csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + files.csv.string());
        write_csv(csv, result_table(result));
        if (!csv) throw std::runtime_error("write failed for " + files.csv.string());
    }
    {
        std::ofstream meta(files.metadata, std::ios::binary);
        if (!meta) throw std::runtime_error("cannot write " + files.metadata.string());
        meta << result_metadata(result).dump(2) << '\n';
        if (!meta) throw std::runtime_error("write failed for " + files.metadata.string());
    }
    return files;
}

}  // namespace ddtrack
