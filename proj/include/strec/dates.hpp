#pragma once

// Month-granular calendar arithmetic for cohort windows. Dates are plain
// proleptic Gregorian y/m/d; no time zones, no times of day.

#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace strec {

struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..days_in_month

    auto operator<=>(const Date&) const = default;
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[month - 1];
}

inline bool is_valid(const Date& d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= days_in_month(d.year, d.month);
}

/// start + n months, clamping the day into the target month.
inline Date add_months(Date d, int n) {
    const int index = (d.year * 12 + (d.month - 1)) + n;
    Date out;
    out.year = index >= 0 ? index / 12 : -((-index + 11) / 12);
    out.month = index - out.year * 12 + 1;
    out.day = d.day;
    const int maxday = days_in_month(out.year, out.month);
    if (out.day > maxday) out.day = maxday;
    return out;
}

/// Whole months from a to b, ignoring days.
inline int months_between(const Date& a, const Date& b) {
    return (b.year * 12 + b.month) - (a.year * 12 + a.month);
}

inline std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

/// Parses an ISO-8601 date "YYYY-MM-DD". Throws std::invalid_argument.
inline Date parse_date(const std::string& s) {
    Date d;
    char extra;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &d.year, &d.month, &d.day, &extra) != 3 ||
        s.size() != 10 || !is_valid(d))
        throw std::invalid_argument("bad date: '" + s + "'");
    return d;
}

}  // namespace strec
