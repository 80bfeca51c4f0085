#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bifurcation::cli {

/// A CSV field: reals print with 17 significant digits.
using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;
using Row = std::vector<Cell>;
using HeaderLines = std::vector<std::pair<std::string, std::string>>;

std::string format_real(double value);
std::string format_cell(const Cell& cell);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string quote_field(const std::string& field);

/// Renders `# key = value` comment lines, the column header and the rows.
/// Throws ConfigError when a row's width differs from the header's.
std::string render_csv(const HeaderLines& header, const std::vector<std::string>& columns,
                       const std::vector<Row>& rows);

/// render_csv written to `path`; throws IoError if the file cannot be written.
void write_csv(const std::filesystem::path& path, const HeaderLines& header,
               const std::vector<std::string>& columns, const std::vector<Row>& rows);

struct CsvDocument {
    HeaderLines header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column; throws ConfigError when absent.
    std::size_t column(const std::string& name) const;
};

CsvDocument parse_csv(const std::string& text);
CsvDocument read_csv(const std::filesystem::path& path);

}  // namespace bifurcation::cli
