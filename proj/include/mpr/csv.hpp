#ifndef MPR_CSV_HPP
#define MPR_CSV_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mpr/errors.hpp"

namespace mpr {

// Comma-separated values with a required header row, '.' decimal separator
// and optional double-quoted fields. No missing values in used columns.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    static CsvTable read_file(const std::string& path);
    static CsvTable parse(const std::string& text, const std::string& origin);

    // -1 when the column is absent
    Eigen::Index column(const std::string& name) const;

    // throws ParseError naming the column, or the row of a bad value
    Eigen::VectorXd numeric_column(const std::string& name) const;
};

// Locale-independent round-trip formatting used by all machine outputs.
std::string format_double(double value);

} // namespace mpr

#endif
