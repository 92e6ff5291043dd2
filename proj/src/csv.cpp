#include "mpr/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mpr {

namespace {

std::vector<std::string> split_record(const std::string& line,
                                      const std::string& origin, size_t lineno) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted)
        throw MprError(ErrorCode::ParseError,
                       origin + ":" + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(field);
    return fields;
}

} // namespace

CsvTable CsvTable::parse(const std::string& text, const std::string& origin) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_record(line, origin, lineno);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw MprError(ErrorCode::ParseError,
                               origin + ":" + std::to_string(lineno) + ": expected " +
                                   std::to_string(table.header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty())
        throw MprError(ErrorCode::ParseError, origin + ": missing header row");
    return table;
}

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MprError(ErrorCode::FileNotFound, path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

Eigen::Index CsvTable::column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<Eigen::Index>(j);
    return -1;
}

Eigen::VectorXd CsvTable::numeric_column(const std::string& name) const {
    const Eigen::Index j = column(name);
    if (j < 0)
        throw MprError(ErrorCode::ParseError, "missing column '" + name + "'");
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        const std::string& cell = rows[i][static_cast<size_t>(j)];
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc{} || ptr != cell.data() + cell.size())
            throw MprError(ErrorCode::ParseError,
                           "column '" + name + "', data row " + std::to_string(i + 1) +
                               ": not a number: '" + cell + "'");
        out[static_cast<Eigen::Index>(i)] = value;
    }
    return out;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace mpr
