#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "ddtrack/csv.hpp"

namespace fs = std::filesystem;
using ddtrack::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ddtrack_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Metadata minus the wall-clock field.
nlohmann::json stable_metadata(const fs::path& p) {
    auto j = nlohmann::json::parse(slurp(p));
    j.erase("wall_time_s");
    return j;
}

}  // namespace

TEST_CASE("bounds command") {
    const Outcome o = invoke({"bounds", "--lambda", "0.5", "--phi", "1", "--e0", "0", "--steps", "50"});
    REQUIRE(o.code == 0);
    std::istringstream in(o.out);
    const ddtrack::CsvTable t = ddtrack::read_csv(in);
    CHECK(t.rows() == 51);
    CHECK(std::abs(t.column("env_opgd").back() - 2.0) <= 1e-6);

    const Outcome half = invoke({"bounds", "--lambda", "0.7", "--phi", "0.1", "--e0", "3", "--steps", "20",
                                 "--xi-mean", "0.4", "--nu", "0.5", "--delta", "0.5"});
    REQUIRE(half.code == 0);
    std::istringstream hin(half.out);
    const ddtrack::CsvTable h = ddtrack::read_csv(hin);
    for (std::size_t r = 0; r < h.rows(); ++r) CHECK(h.column("env_markov")[r] == 2.0 * h.column("env_exp")[r]);

    const Outcome lim = invoke({"bounds", "--lambda", "0.5", "--phi", "1", "--e0", "0", "--steps", "3", "--limsup"});
    CHECK(lim.out.find("limsup") != std::string::npos);
}

TEST_CASE("bounds command errors") {
    const Outcome missing = invoke({"bounds", "--lambda", "0.5", "--phi", "1", "--steps", "5"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--e0") != std::string::npos);

    CHECK(invoke({"bounds", "--lambda", "0.5", "--phi", "1", "--e0", "0", "--steps", "5", "--delta", "1.5"}).code == 2);
    CHECK(invoke({"bounds", "--lambda", "1.2", "--phi", "1", "--e0", "0", "--steps", "5", "--limsup"}).code == 2);
    CHECK(invoke({"bounds", "--lambda", "abc", "--phi", "1", "--e0", "0", "--steps", "5"}).code == 1);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
}

TEST_CASE("reproduce-ev") {
    const fs::path a = scratch("run_a"), b = scratch("run_b"), c = scratch("run_c");
    for (const auto& d : {a, b, c}) fs::remove_all(d);
    REQUIRE(invoke({"reproduce-ev", "--seed", "7", "--replications", "12", "--out-dir", a.string(), "--workers", "1"})
                .code == 0);
    REQUIRE(invoke({"reproduce-ev", "--seed", "7", "--replications", "12", "--out-dir", b.string(), "--workers", "3"})
                .code == 0);
    REQUIRE(invoke({"reproduce-ev", "--seed", "8", "--replications", "12", "--out-dir", c.string()}).code == 0);

    CHECK(slurp(a / "ev_result.csv") == slurp(b / "ev_result.csv"));
    CHECK(stable_metadata(a / "ev_metadata.json") == stable_metadata(b / "ev_metadata.json"));
    CHECK(slurp(a / "ev_result.csv") != slurp(c / "ev_result.csv"));

    std::ifstream in(a / "ev_result.csv");
    const ddtrack::CsvTable t = ddtrack::read_csv(in);
    CHECK(t.rows() == 100);
    CHECK(t.header == std::vector<std::string>{"t", "mean_err_exact", "mean_err_greedy", "mean_err_lazy", "env_opgd",
                                               "env_exp", "env_hp", "env_markov", "phi"});
}

TEST_CASE("reproduce-ev failures") {
    const fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    const Outcome o = invoke({"reproduce-ev", "--replications", "2", "--out-dir", (blocker / "out").string()});
    CHECK(o.code != 0);
    CHECK_FALSE(o.err.empty());

    const fs::path cfg = scratch("bad.json");
    std::ofstream(cfg) << R"({"stations": 10, "colour": "red"})";
    const Outcome bad = invoke({"reproduce-ev", "--config", cfg.string(), "--out-dir", scratch("x").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("colour") != std::string::npos);

    CHECK(invoke({"reproduce-ev", "--replications", "2"}).code == 1);
}

TEST_CASE("fit-tail") {
    const fs::path constant = scratch("constant.csv");
    {
        std::ofstream f(constant);
        for (int i = 0; i < 150; ++i) f << "-2.5\n";
    }
    Outcome o = invoke({"fit-tail", "--input", constant.string(), "--theta", "1"});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("nu_hat,2.5\n") != std::string::npos);

    const fs::path gauss = scratch("gauss.csv");
    {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        std::ofstream f(gauss);
        f << "xi\n";
        for (int i = 0; i < 20000; ++i) f << g(rng) << '\n';
    }
    o = invoke({"fit-tail", "--input", gauss.string(), "--theta", "0.5"});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("bound_dominates,yes") != std::string::npos);

    const fs::path empty = scratch("empty.csv");
    std::ofstream(empty).close();
    CHECK(invoke({"fit-tail", "--input", empty.string()}).code != 0);

    const fs::path few = scratch("few.csv");
    std::ofstream(few) << "1\n2\n3\n";
    CHECK(invoke({"fit-tail", "--input", few.string()}).code != 0);

    const fs::path zeros = scratch("zeros.csv");
    {
        std::ofstream f(zeros);
        for (int i = 0; i < 100; ++i) f << "0\n";
    }
    o = invoke({"fit-tail", "--input", zeros.string()});
    CHECK(o.code == 0);
    CHECK(o.out.find("degenerate") != std::string::npos);
}
