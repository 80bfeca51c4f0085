#include "bifurcation/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bifurcation/error.hpp"

namespace bifurcation::cli {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return quote_field(v);
            } else {
                return std::to_string(v);
            }
        },
        cell);
}

std::string quote_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_csv(const HeaderLines& header, const std::vector<std::string>& columns,
                       const std::vector<Row>& rows) {
    std::string out;
    for (const auto& [key, value] : header) {
        out += "# " + key + " = " + value + "\n";
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += quote_field(columns[i]);
    }
    out += '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != columns.size()) {
            throw ConfigError("csv row " + std::to_string(r) + " has " +
                              std::to_string(rows[r].size()) + " fields, expected " +
                              std::to_string(columns.size()));
        }
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            if (i) out += ',';
            out += format_cell(rows[r][i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const HeaderLines& header,
               const std::vector<std::string>& columns, const std::vector<Row>& rows) {
    const std::string text = render_csv(header, columns, rows);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::size_t CsvDocument::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw ConfigError("csv has no column '" + name + "'");
}

namespace {

// Splits one record starting at `pos`, honouring quoted fields that may
// span lines. Advances `pos` past the record terminator.
std::vector<std::string> next_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw ConfigError("csv has an unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

CsvDocument parse_csv(const std::string& text) {
    CsvDocument doc;
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == '#') {
        const std::size_t end = text.find('\n', pos);
        const std::string line =
            text.substr(pos + 1, (end == std::string::npos ? text.size() : end) - pos - 1);
        const std::size_t eq = line.find(" = ");
        if (eq == std::string::npos) {
            doc.header.emplace_back(line, "");
        } else {
            std::string key = line.substr(0, eq);
            if (!key.empty() && key.front() == ' ') key.erase(0, 1);
            doc.header.emplace_back(key, line.substr(eq + 3));
        }
        pos = end == std::string::npos ? text.size() : end + 1;
    }
    if (pos >= text.size()) throw ConfigError("csv has no column header");
    doc.columns = next_record(text, pos);
    while (pos < text.size()) {
        auto fields = next_record(text, pos);
        if (fields.size() != doc.columns.size()) {
            throw ConfigError("csv row " + std::to_string(doc.rows.size()) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(doc.columns.size()));
        }
        doc.rows.push_back(std::move(fields));
    }
    return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

}  // namespace bifurcation::cli
