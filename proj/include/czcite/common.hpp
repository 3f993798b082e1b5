#pragma once

#include <compare>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace czcite {

// Bad or inconsistent run configuration (missing paths, bad values). CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (manifests, model files, gold files). CLI exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Half-open byte range [begin, end) into a UTF-8 document text.
struct CharRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return begin >= end; }
    bool operator==(const CharRange&) const = default;
};

enum class CourtClass { SC, SAC, CC, Other };

inline const char* court_name(CourtClass c) {
    switch (c) {
        case CourtClass::SC: return "SC";
        case CourtClass::SAC: return "SAC";
        case CourtClass::CC: return "CC";
        case CourtClass::Other: return "OTHER";
    }
    return "OTHER";
}

inline CourtClass parse_court(const std::string& s) {
    if (s == "SC") return CourtClass::SC;
    if (s == "SAC") return CourtClass::SAC;
    if (s == "CC") return CourtClass::CC;
    if (s == "OTHER") return CourtClass::Other;
    throw DataError("unknown court class: '" + s + "'");
}

// Calendar date, ISO-8601 "YYYY-MM-DD".
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return d[m - 1];
}

inline Date parse_date(const std::string& s) {
    auto fail = [&] { throw DataError("malformed date: '" + s + "' (expected YYYY-MM-DD)"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') fail();
    Date d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) fail();
    return d;
}

} // namespace czcite
