#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "czcite/common.hpp"
#include "czcite/text.hpp"

namespace czcite {

using ojson = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw DataError("read failed: " + path.string());
    return content;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + path.string());
}

// Writes via a temp file + rename so a failed run never leaves a half-written artifact.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, content);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw DataError("cannot replace file: " + path.string());
    }
}

// One JSON object per non-blank line, with its 1-based line number for error
// reporting downstream.
inline std::vector<std::pair<std::size_t, ojson>> read_jsonl_rows(const std::filesystem::path& path) {
    std::string content = read_file(path);
    std::vector<std::pair<std::size_t, ojson>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line(content.data() + pos,
                              (nl == std::string::npos ? content.size() : nl) - pos);
        ++line_no;
        if (!trim_view(line).empty()) {
            ojson row = ojson::parse(line, nullptr, false);
            if (row.is_discarded())
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
            if (!row.is_object())
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": expected a JSON object");
            rows.emplace_back(line_no, std::move(row));
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return rows;
}

inline std::vector<ojson> read_jsonl(const std::filesystem::path& path) {
    std::vector<ojson> rows;
    for (auto& [line, row] : read_jsonl_rows(path)) rows.push_back(std::move(row));
    return rows;
}

inline std::string to_jsonl(const std::vector<ojson>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += row.dump();
        out.push_back('\n');
    }
    return out;
}

// Fetches a required key with type checking; context names the file/line for errors.
inline const ojson& json_field(const ojson& row, const char* key, const std::string& context) {
    auto it = row.find(key);
    if (it == row.end()) throw DataError(context + ": missing key \"" + key + "\"");
    return *it;
}

inline std::string json_string(const ojson& row, const char* key, const std::string& context) {
    const ojson& v = json_field(row, key, context);
    if (!v.is_string()) throw DataError(context + ": key \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::size_t json_size(const ojson& row, const char* key, const std::string& context) {
    const ojson& v = json_field(row, key, context);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw DataError(context + ": key \"" + key + "\" must be a non-negative integer");
    auto n = v.get<long long>();
    if (n < 0) throw DataError(context + ": key \"" + key + "\" must be non-negative");
    return static_cast<std::size_t>(n);
}

} // namespace czcite
