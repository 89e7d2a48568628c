#include "medliab/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace medliab {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

std::string to_csv(const Table& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

}  // namespace medliab
