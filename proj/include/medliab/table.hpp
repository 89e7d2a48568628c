#pragma once

// Plot-ready tabular output and its CSV encoding.
//
// CSV format: header line, then one line per row; fields joined with ','
// and lines ended with '\n'. Reals use '%.12g' with '.' as the decimal
// separator, NaN is written as "nan" and empty cells as nothing.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace medliab {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits, locale-independent.
[[nodiscard]] std::string format_real(double v);
[[nodiscard]] std::string format_cell(const Cell& c);

void write_csv(std::ostream& os, const Table& t);
[[nodiscard]] std::string to_csv(const Table& t);

}  // namespace medliab
