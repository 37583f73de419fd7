#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ddtrack/bounds.hpp"
#include "ddtrack/csv.hpp"
#include "ddtrack/errors.hpp"
#include "ddtrack/harness.hpp"
#include "ddtrack/subweibull.hpp"

namespace ddtrack::cli {

namespace {

struct ReproduceOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> replications;
    std::string prices;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

struct BoundsOptions {
    double lambda = 0.0;
    double phi = 0.0;
    double e0 = 0.0;
    double eta = 0.3;
    double xi_mean = 0.0;
    double theta = 0.5;
    double nu = 0.0;
    double delta = 0.1;
    std::size_t steps = 0;
    bool limsup = false;
};

struct FitTailOptions {
    std::string input;
    double theta = 0.5;
    int max_order = kDefaultMomentCap;
};

int reproduce_ev(const ReproduceOptions& o, std::ostream& out) {
    ScenarioConfig config = o.config.empty() ? ScenarioConfig{} : load_scenario(o.config);
    if (o.seed) config.seed = *o.seed;
    if (o.replications) config.replications = *o.replications;
    if (!o.prices.empty()) config.price_file = o.prices;
    config.validate();

    const ExperimentResult result = run_experiment(config, o.workers);
    const ResultFiles files = write_result_files(result, o.out_dir);

    out << "wrote " << files.csv.string() << '\n' << "wrote " << files.metadata.string() << '\n';
    const std::size_t T = result.horizon;
    out << "steady-state mean tracking error (t=" << T - 1 << "): exact " << result.exact.mean_error.back()
        << ", lazy " << result.lazy.mean_error.back() << ", greedy " << result.greedy.mean_error.back() << '\n';
    if (!result.contraction.all_ok) out << "note: contraction condition violated at some steps; see metadata\n";
    if (result.exact_domination_violations > 0)
        out << "note: " << result.exact_domination_violations << " exact runs exceeded their envelope\n";
    return kSuccess;
}

int bounds(const BoundsOptions& o, std::ostream& out) {
    if (o.steps < 1) throw DomainError("--steps must be >= 1");
    BoundInputs in;
    in.lambda.assign(o.steps, o.lambda);
    in.phi.assign(o.steps, o.phi);
    in.e0 = o.e0;
    in.eta.assign(o.steps, o.eta);
    in.xi_mean.assign(o.steps, o.xi_mean);
    in.theta = o.theta;
    in.nu.assign(o.steps, o.nu);
    in.delta = o.delta;

    CsvTable table;
    table.header = {"t", "env_opgd", "env_exp", "env_hp", "env_markov"};
    Vec t(o.steps + 1);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    table.columns = {t, opgd_envelope(in), ospgd_expectation_envelope(in), ospgd_hp_envelope(in), markov_envelope(in)};
    if (o.limsup) {
        table.header.emplace_back("limsup");
        table.columns.emplace_back(o.steps + 1, limsup_bound(o.lambda, o.phi));
    }
    write_csv(out, table);
    return kSuccess;
}

int fit_tail(const FitTailOptions& o, std::ostream& out) {
    const Vec samples = read_value_column(std::filesystem::path(o.input));
    if (samples.empty()) throw InsufficientData("fit-tail: " + o.input + " contains no samples");
    const SubWeibullFit fit = fit_subweibull(samples, o.theta, o.max_order);

    out << "nu_hat," << format_double(fit.nu) << '\n';
    out << "theta," << format_double(o.theta) << '\n';
    out << "samples," << samples.size() << '\n';
    if (fit.degenerate) {
        out << "degenerate,all samples are zero; no tail table\n";
        return kSuccess;
    }

    double peak = 0.0;
    for (double z : samples) peak = std::max(peak, std::abs(z));
    const SubWeibull descriptor(o.theta, fit.nu);
    const auto n = static_cast<double>(samples.size());
    bool all_bounded = true;
    out << "epsilon,empirical_tail,subweibull_bound\n";
    for (int j = 1; j <= 20; ++j) {
        const double eps = peak * j / 10.0;
        const double freq =
            static_cast<double>(std::count_if(samples.begin(), samples.end(),
                                              [&](double z) { return std::abs(z) >= eps; })) / n;
        const double bound = tail_bound(descriptor, eps);
        all_bounded = all_bounded && bound >= freq;
        out << format_double(eps) << ',' << format_double(freq) << ',' << format_double(bound) << '\n';
    }
    out << "bound_dominates," << (all_bounded ? "yes" : "no") << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tracking decision-dependent stochastic optimisation: experiments and bounds", "ddtrack"};
    app.require_subcommand(1);

    ReproduceOptions rep;
    auto* reproduce = app.add_subcommand("reproduce-ev", "Run the fleet-charging experiment and write CSV + JSON");
    reproduce->add_option("--config", rep.config, "Scenario JSON file (defaults used when omitted)");
    reproduce->add_option("--seed", rep.seed, "Master seed for all randomness");
    reproduce->add_option("--out-dir", rep.out_dir, "Output directory")->required();
    reproduce->add_option("--replications", rep.replications, "Monte Carlo replications");
    reproduce->add_option("--prices", rep.prices, "Price CSV (synthetic series when omitted)");
    reproduce->add_option("--workers", rep.workers, "Worker threads")->check(CLI::PositiveNumber);

    BoundsOptions bo;
    auto* bnd = app.add_subcommand("bounds", "Evaluate all tracking envelopes for constant inputs");
    bnd->add_option("--lambda", bo.lambda, "Contraction factor per step")->required();
    bnd->add_option("--phi", bo.phi, "Drift per step")->required();
    bnd->add_option("--e0", bo.e0, "Initial tracking error")->required();
    bnd->add_option("--steps", bo.steps, "Number of steps")->required();
    bnd->add_option("--eta", bo.eta, "Step size");
    bnd->add_option("--xi-mean", bo.xi_mean, "Mean gradient error");
    bnd->add_option("--theta", bo.theta, "Sub-Weibull tail exponent");
    bnd->add_option("--nu", bo.nu, "Sub-Weibull proxy variance of the gradient error");
    bnd->add_option("--delta", bo.delta, "Confidence level in (0,1)");
    bnd->add_flag("--limsup", bo.limsup, "Append the asymptotic bound column");

    FitTailOptions fo;
    auto* fit = app.add_subcommand("fit-tail", "Fit a sub-Weibull proxy variance to samples");
    fit->add_option("--input", fo.input, "CSV with one sample per line")->required();
    fit->add_option("--theta", fo.theta, "Tail exponent");
    fit->add_option("--max-order", fo.max_order, "Highest moment order");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*reproduce) return reproduce_ev(rep, out);
        if (*bnd) return bounds(bo, out);
        if (*fit) return fit_tail(fo, out);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace ddtrack::cli
