#pragma once

// Minimal RFC 4180 CSV writing/reading: comma-separated, quoted fields with
// doubled inner quotes, LF line ends.

#include <string>
#include <string_view>
#include <vector>

#include "czcite/common.hpp"

namespace czcite {

inline std::string csv_field(std::string_view s) {
    bool needs_quote = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quote) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void csv_append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_field(fields[i]);
    }
    out.push_back('\n');
}

inline std::vector<std::vector<std::string>> csv_parse(std::string_view content,
                                                       const std::string& context = "csv") {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };
    while (i < content.size()) {
        char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            row_started = true;
        } else if (c == ',') {
            end_field();
            row_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (row_started || !field.empty()) end_row();
        } else {
            field.push_back(c);
            row_started = true;
        }
        ++i;
    }
    if (quoted) throw DataError(context + ": unterminated quoted field");
    if (row_started || !field.empty()) end_row();
    return rows;
}

} // namespace czcite
