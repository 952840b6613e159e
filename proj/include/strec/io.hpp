#pragma once

// Small CSV helpers shared by the cohort ingester, the generator and the
// CLI. The schemas here never contain quoted or embedded-comma fields.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strec {

/// Parse or validation failure with file/row context.
class DataError : public std::runtime_error {
  public:
    DataError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate computation (e.g. PD undefined because every member withdrew).
class DegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

/// Doubles are printed with 17 significant digits so that re-runs diff clean
/// and round-trip exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& file, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(file, line, "bad number: '" + s + "'");
    }
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    return in;
}

}  // namespace strec
