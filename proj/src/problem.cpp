#include "ddtrack/problem.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ddtrack/diagnostics.hpp"
#include "ddtrack/errors.hpp"
#include "ddtrack/sequence.hpp"

namespace ddtrack {

void RegularityConstants::validate() const {
    const std::size_t T = alpha.size();
    if (T == 0) throw InvalidConstants("regularity constants: empty horizon");
    if (beta.size() != T || eps.size() != T || gamma_lip.size() != T)
        throw InvalidConstants("regularity constants: sequences differ in length");
    for (std::size_t t = 0; t < T; ++t) {
        if (!(alpha[t] > 0.0)) throw InvalidConstants("alpha must be positive at step " + std::to_string(t));
        if (!(beta[t] > 0.0)) throw InvalidConstants("beta must be positive at step " + std::to_string(t));
        if (beta[t] < alpha[t])
            throw InvalidConstants("beta must be >= alpha at step " + std::to_string(t));
        if (!(eps[t] >= 0.0)) throw InvalidConstants("eps must be >= 0 at step " + std::to_string(t));
        if (!(gamma_lip[t] >= 0.0)) throw InvalidConstants("gamma_lip must be >= 0 at step " + std::to_string(t));
    }
}

ContractionReport validate_contraction(const RegularityConstants& c) {
    if (c.alpha.size() != c.beta.size() || c.alpha.size() != c.eps.size())
        throw InvalidConstants("validate_contraction: sequences differ in length");
    ContractionReport report;
    report.ratio.resize(c.alpha.size());
    report.ok.resize(c.alpha.size());
    for (std::size_t t = 0; t < c.alpha.size(); ++t) {
        if (!(c.alpha[t] > 0.0) || !(c.beta[t] > 0.0))
            throw InvalidConstants("validate_contraction: alpha and beta must be positive (step " +
                                   std::to_string(t) + ")");
        report.ratio[t] = c.eps[t] * c.beta[t] / c.alpha[t];
        report.ok[t] = report.ratio[t] < 1.0;
        report.all_ok = report.all_ok && report.ok[t];
    }
    return report;
}

Example1ClosedForms example1_closed_forms(double mu) {
    if (!(mu >= 0.0)) throw DomainError("example1_closed_forms: mu must be >= 0");
    // E[x^2 + z] = x^2 + mu x is minimised at -mu/2; the gradient 2x ignores
    // the induced distribution, so the stable point is 0.
    constexpr double alpha = 2.0;
    constexpr double gamma = 1.0;
    return {-mu / 2.0, 0.0, 2.0 * mu * gamma / alpha};
}

RegularityConstants derive_constants(std::size_t dimension, const std::vector<Loss>& losses,
                                     const std::vector<ConstraintSet>& constraints,
                                     const std::vector<GaussianLocationMap>& maps) {
    const std::size_t T = losses.size();
    RegularityConstants c{Vec(T), Vec(T), Vec(T), Vec(T)};
    for (std::size_t t = 0; t < T; ++t) {
        const LossCurvature k = curvature(losses[t], dimension);
        c.alpha[t] = k.hessian_min;
        c.beta[t] = std::max(k.hessian_max, k.z_lipschitz);
        c.eps[t] = maps[t].sensitivity();
        c.gamma_lip[t] = std::holds_alternative<Example1Loss>(losses[t])
                             ? std::sqrt(static_cast<double>(dimension))
                             : max_norm(constraints[t]);
    }
    return c;
}

namespace {

bool close(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

void warn_on_mismatch(const RegularityConstants& given, const RegularityConstants& derived) {
    int mismatched = 0;
    std::size_t first = 0;
    for (std::size_t t = 0; t < given.horizon(); ++t) {
        const bool same = close(given.alpha[t], derived.alpha[t]) && close(given.beta[t], derived.beta[t]) &&
                          close(given.eps[t], derived.eps[t]);
        if (!same && mismatched++ == 0) first = t;
    }
    if (mismatched > 0) {
        std::ostringstream os;
        os << "supplied regularity constants differ from Hessian-derived ones at " << mismatched
           << " step(s); first at t=" << first << ": supplied (alpha=" << given.alpha[first]
           << ", beta=" << given.beta[first] << ", eps=" << given.eps[first] << "), derived (alpha="
           << derived.alpha[first] << ", beta=" << derived.beta[first] << ", eps=" << derived.eps[first] << ")";
        warn(os.str());
    }
}

}  // namespace

ProblemInstance::ProblemInstance(std::size_t dimension, std::vector<Loss> losses,
                                 std::vector<ConstraintSet> constraints, std::vector<GaussianLocationMap> maps,
                                 std::optional<RegularityConstants> constants)
    : dimension_(dimension), losses_(std::move(losses)), constraints_(std::move(constraints)),
      maps_(std::move(maps)) {
    const std::size_t T = losses_.size();
    if (dimension_ < 1) throw DimensionMismatch("problem: dimension must be >= 1");
    if (T < 1) throw InvalidConstants("problem: horizon must be >= 1");
    if (constraints_.size() != T || maps_.size() != T)
        throw InvalidConstants("problem: losses, constraints and maps must share the horizon");
    for (std::size_t t = 0; t < T; ++t) {
        validate(losses_[t]);
        validate(constraints_[t]);
        maps_[t].validate();
        if (auto d = loss_dimension(losses_[t]); d && *d != dimension_)
            throw DimensionMismatch("problem: loss dimension differs at step " + std::to_string(t));
        if (auto d = intrinsic_dimension(constraints_[t]); d && *d != dimension_)
            throw DimensionMismatch("problem: constraint dimension differs at step " + std::to_string(t));
    }
    derived_ = derive_constants(dimension_, losses_, constraints_, maps_);
    if (constants) {
        if (constants->gamma_lip.empty()) constants->gamma_lip = derived_.gamma_lip;
        constants->validate();
        if (constants->horizon() != T) throw InvalidConstants("problem: constants horizon differs from losses");
        warn_on_mismatch(*constants, derived_);
        constants_ = std::move(*constants);
    } else {
        constants_ = derived_;
        constants_.validate();
    }
}

ProblemInstance ProblemInstance::with_constants(RegularityConstants constants) const {
    if (constants.gamma_lip.empty()) constants.gamma_lip = derived_.gamma_lip;
    constants.validate();
    if (constants.horizon() != horizon()) throw InvalidConstants("with_constants: horizon differs");
    ProblemInstance copy = *this;
    copy.constants_ = std::move(constants);
    return copy;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
    return obj.at(key);
}

Vec number_array(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw ParseError(where + ": expected an array of numbers");
    Vec out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ParseError(where + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::size_t positive_count(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(where + ": must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

ProblemInstance parse_problem(const nlohmann::json& cfg) {
    const std::size_t T = positive_count(require(cfg, "horizon", "problem"), "horizon");
    const std::size_t d = positive_count(require(cfg, "dimension", "problem"), "dimension");

    std::vector<Loss> losses;
    const auto& loss = require(cfg, "loss", "problem");
    const auto family = require(loss, "family", "loss").get<std::string>();
    if (family == "example1") {
        losses.assign(T, Example1Loss{});
    } else if (family == "quadratic-separable") {
        const Vec gamma = expand_sequence(require(loss, "gamma", "loss"), T, "loss.gamma");
        const Vec kappa = expand_sequence(require(loss, "kappa", "loss"), T, "loss.kappa");
        for (std::size_t t = 0; t < T; ++t) losses.push_back(QuadraticSeparableLoss{Vec(d, gamma[t]), Vec(d, kappa[t])});
    } else {
        throw ParseError("loss.family: unknown family \"" + family + "\"");
    }

    std::vector<ConstraintSet> sets;
    const auto& con = cfg.contains("constraint") ? cfg.at("constraint") : nlohmann::json{{"type", "full-space"}};
    const auto type = require(con, "type", "constraint").get<std::string>();
    if (type == "full-space") {
        sets.assign(T, FullSpace{});
    } else if (type == "budget-halfspace" || type == "nonneg-budget") {
        const Vec cap = expand_sequence(require(con, "capacity", "constraint"), T, "constraint.capacity");
        for (double c : cap) {
            if (type == "budget-halfspace") sets.emplace_back(BudgetHalfspace{c});
            else sets.emplace_back(NonnegBudget{c});
        }
    } else if (type == "box") {
        Box box{number_array(require(con, "lo", "constraint"), "constraint.lo"),
                number_array(require(con, "hi", "constraint"), "constraint.hi")};
        sets.assign(T, box);
    } else if (type == "ball") {
        const Vec center = number_array(require(con, "center", "constraint"), "constraint.center");
        const Vec radius = expand_sequence(require(con, "radius", "constraint"), T, "constraint.radius");
        for (double r : radius) sets.emplace_back(EuclideanBall{center, r});
    } else {
        throw ParseError("constraint.type: unknown type \"" + type + "\"");
    }

    std::vector<GaussianLocationMap> maps;
    const auto& m = require(cfg, "map", "problem");
    if (m.contains("type") && m.at("type") != "gaussian-location")
        throw ParseError("map.type: only \"gaussian-location\" is supported");
    const Vec mu = expand_sequence(require(m, "mu", "map"), T, "map.mu");
    const Vec sigma = expand_sequence(require(m, "sigma", "map"), T, "map.sigma");
    for (std::size_t t = 0; t < T; ++t) maps.push_back({mu[t], sigma[t]});

    std::optional<RegularityConstants> constants;
    if (cfg.contains("constants")) {
        const auto& c = cfg.at("constants");
        RegularityConstants rc{expand_sequence(require(c, "alpha", "constants"), T, "constants.alpha"),
                               expand_sequence(require(c, "beta", "constants"), T, "constants.beta"),
                               expand_sequence(require(c, "eps", "constants"), T, "constants.eps"),
                               {}};
        if (c.contains("gamma_lip")) rc.gamma_lip = expand_sequence(c.at("gamma_lip"), T, "constants.gamma_lip");
        constants = std::move(rc);
    }
    return ProblemInstance(d, std::move(losses), std::move(sets), std::move(maps), std::move(constants));
}

ProblemInstance load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file " + path.string());
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return parse_problem(cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace ddtrack
