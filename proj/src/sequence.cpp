#include "ddtrack/sequence.hpp"

#include <string>
#include <utility>
#include <vector>

#include "ddtrack/errors.hpp"

namespace ddtrack {

namespace {

[[noreturn]] void fail(std::string_view field, const std::string& what) {
    throw ParseError(std::string(field) + ": " + what);
}

}  // namespace

double piecewise_linear(std::span<const std::pair<double, double>> knots, double t) {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    for (std::size_t k = 1; k < knots.size(); ++k) {
        const auto [t1, v1] = knots[k];
        if (t <= t1) {
            const auto [t0, v0] = knots[k - 1];
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return knots.back().second;
}

Vec expand_sequence(const nlohmann::json& desc, std::size_t T, std::string_view field) {
    if (desc.is_number()) return Vec(T, desc.get<double>());

    if (desc.is_array()) {
        if (desc.size() != T)
            fail(field, "explicit sequence has " + std::to_string(desc.size()) + " entries, horizon is " +
                            std::to_string(T));
        Vec out;
        out.reserve(T);
        for (const auto& v : desc) {
            if (!v.is_number()) fail(field, "explicit sequence contains a non-number");
            out.push_back(v.get<double>());
        }
        return out;
    }

    if (!desc.is_object() || !desc.contains("type") || !desc["type"].is_string())
        fail(field, "expected a number, an array, or an object with a \"type\"");

    const auto type = desc["type"].get<std::string>();
    if (type == "constant") {
        if (!desc.contains("value") || !desc["value"].is_number()) fail(field, "constant needs numeric \"value\"");
        return Vec(T, desc["value"].get<double>());
    }
    if (type == "piecewise-linear") {
        if (!desc.contains("knots") || !desc["knots"].is_array() || desc["knots"].empty())
            fail(field, "piecewise-linear needs a non-empty \"knots\" array");
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : desc["knots"]) {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
                fail(field, "each knot must be [t, value]");
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i].first > knots[i - 1].first)) fail(field, "knot times must be strictly increasing");
        Vec out(T);
        for (std::size_t t = 0; t < T; ++t) out[t] = piecewise_linear(knots, static_cast<double>(t));
        return out;
    }
    fail(field, "unknown sequence type \"" + type + "\"");
}

}  // namespace ddtrack
