#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "gscol/convergence.hpp"

namespace gscol {

// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    for (char& ch : buf) {
        if (ch == '\0') break;
        if (ch == ',') ch = '.';
    }
    return buf;
}

// Columns N,value,error,order with empty cells where a row has no error or
// order yet. '\n' line endings.
inline void write_report_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "N,value,error,order\n";
    for (const ConvergenceRow& row : report.rows) {
        os << row.N << ',' << format_value(row.value) << ',';
        if (row.has_error) os << format_value(row.error);
        os << ',';
        if (row.has_order) os << format_value(row.order);
        os << '\n';
    }
}

} // namespace gscol
