#pragma once

// Internal CSV helpers shared by the table readers/writers.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lungpipe/errors.hpp"

namespace lungpipe::detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

/// Shortest representation carrying 17 significant digits (round-trips a double).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double_field(const std::string& field, const std::string& context) {
    if (field.empty())
        throw format_error(context + ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw format_error(context + ": bad numeric field '" + field + "'");
    return v;
}

} // namespace lungpipe::detail
