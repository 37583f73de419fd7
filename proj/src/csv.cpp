#include "ddtrack/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ddtrack/errors.hpp"
#include "ddtrack/harness.hpp"

namespace ddtrack {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const Vec& CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns.at(i);
    throw ParseError("csv: no column named \"" + std::string(name) + "\"");
}

void write_csv(std::ostream& out, const CsvTable& table) {
    if (table.header.size() != table.columns.size()) throw DimensionMismatch("csv: header and column counts differ");
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_double(table.columns[c].at(r));
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv: missing header");
    table.header = split(trim(line));
    table.columns.assign(table.header.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line));
        if (cells.size() != table.header.size())
            throw ParseError("csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = parse_double(cells[c]);
            if (!v) throw ParseError("csv: row " + std::to_string(row) + ": malformed value \"" + cells[c] + "\"");
            table.columns[c].push_back(*v);
        }
    }
    return table;
}

CsvTable result_table(const ExperimentResult& r) {
    CsvTable t;
    t.header = {"t", "mean_err_exact", "mean_err_greedy", "mean_err_lazy", "env_opgd",
                "env_exp", "env_hp", "env_markov", "phi"};
    Vec steps(r.horizon);
    for (std::size_t i = 0; i < r.horizon; ++i) steps[i] = static_cast<double>(i);
    // the stochastic envelope columns carry the greedy (single-sample) variant
    t.columns = {steps,
                 r.exact.mean_error,
                 r.greedy.mean_error,
                 r.lazy.mean_error,
                 r.env_opgd,
                 r.greedy.env_expectation,
                 r.greedy.env_hp,
                 r.greedy.env_markov,
                 r.phi};
    return t;
}

Vec read_value_column(std::istream& in, std::optional<std::string_view> header) {
    Vec out;
    std::string line;
    std::size_t row = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++row;
        const std::string cell = trim(line);
        if (cell.empty()) continue;
        const auto v = parse_double(cell);
        if (first_content && !v && (!header || header->empty() || cell == *header)) {
            first_content = false;
            continue;
        }
        first_content = false;
        if (!v) throw ParseError("row " + std::to_string(row) + ": malformed value \"" + cell + "\"");
        out.push_back(*v);
    }
    return out;
}

Vec read_value_column(const std::filesystem::path& path, std::optional<std::string_view> header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_value_column(in, header);
}

}  // namespace ddtrack
