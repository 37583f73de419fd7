#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddtrack/vec.hpp"

namespace ddtrack {

struct ExperimentResult;

// 17 significant digits; parsing the text gives back the same double.
std::string format_double(double v);

// Column-major numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<Vec> columns;

    [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] const Vec& column(std::string_view name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

// t, mean_err_exact, mean_err_greedy, mean_err_lazy, env_opgd, env_exp, env_hp, env_markov, phi
CsvTable result_table(const ExperimentResult& result);

/// One decimal value per line with an optional non-numeric header equal to
/// `header` (any header when empty). Blank lines are skipped.
/// Throws ParseError naming the 1-based row of a malformed value.
Vec read_value_column(std::istream& in, std::optional<std::string_view> header = std::nullopt);
Vec read_value_column(const std::filesystem::path& path, std::optional<std::string_view> header = std::nullopt);

}  // namespace ddtrack
