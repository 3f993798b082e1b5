#pragma once

// Repair, classification, and standardization of raw court-identifier strings
// into canonical docket numbers. Everything here is a pure function of its
// inputs plus the registry table.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "czcite/common.hpp"
#include "czcite/io.hpp"
#include "czcite/text.hpp"

namespace czcite {

// Registry marks (the letter code inside a docket number) mapped to the court
// they belong to. Loaded from a one-mark-per-line text file; the shipped table
// is a best-effort default and is data, not ground truth.
class RegistryTable {
public:
    void add(const std::string& mark, CourtClass court) {
        if (mark.empty()) throw DataError("registry: empty mark");
        if (court == CourtClass::Other) throw DataError("registry: marks must map to an apex court");
        marks_[mark] = court;
    }

    static RegistryTable from_lines(const std::string& content, const std::string& context) {
        RegistryTable table;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= content.size()) {
            std::size_t nl = content.find('\n', pos);
            std::string line = content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos);
            ++line_no;
            std::string t = trim(line);
            if (!t.empty() && t[0] != '#') {
                std::size_t sp = t.find(' ');
                if (sp == std::string::npos)
                    throw DataError(context + ":" + std::to_string(line_no) +
                                    ": expected '<mark> <SC|SAC|CC>'");
                std::string mark = trim(t.substr(0, sp));
                std::string court = trim(t.substr(sp + 1));
                try {
                    table.add(mark, parse_court(court));
                } catch (const DataError& e) {
                    throw DataError(context + ":" + std::to_string(line_no) + ": " + e.what());
                }
            }
            if (nl == std::string::npos) break;
            pos = nl + 1;
        }
        if (table.marks_.empty()) throw DataError(context + ": registry table is empty");
        return table;
    }

    static RegistryTable load(const std::filesystem::path& path) {
        return from_lines(read_file(path), path.string());
    }

    std::optional<CourtClass> court_of(const std::string& mark) const {
        auto it = marks_.find(mark);
        if (it == marks_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& mark) const { return marks_.count(mark) > 0; }
    const std::map<std::string, CourtClass>& marks() const { return marks_; }

private:
    std::map<std::string, CourtClass> marks_;
};

// A standardized docket number. senate is decimal digits for SC/SAC and a
// roman numeral I-IV or "Pl" for CC.
struct CanonicalIdentifier {
    CourtClass court = CourtClass::Other;
    std::string senate;
    std::string registry_mark;
    uint32_t number = 0;
    int year = 0;

    bool operator==(const CanonicalIdentifier&) const = default;
};

struct NormalizationOutcome {
    enum class Kind { Canonical, OtherCourt, Unparseable };

    Kind kind = Kind::Unparseable;
    CanonicalIdentifier canonical; // set iff kind == Canonical
    std::string raw;               // the input string
    std::string reason;            // set iff kind == Unparseable
    bool needs_review = false;     // Unparseable always reviews

    bool is_canonical() const { return kind == Kind::Canonical; }
};

inline const char* outcome_kind_name(NormalizationOutcome::Kind k) {
    switch (k) {
        case NormalizationOutcome::Kind::Canonical: return "canonical";
        case NormalizationOutcome::Kind::OtherCourt: return "other_court";
        case NormalizationOutcome::Kind::Unparseable: return "unparseable";
    }
    return "unparseable";
}

namespace detail {

// Maximal letter runs (ASCII letters plus any multi-byte sequence, which covers
// the Czech alphabet) in left-to-right order.
inline std::vector<std::string> letter_runs(std::string_view s) {
    std::vector<std::string> runs;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len;
        uint32_t cp = utf8_decode(s, i, len);
        if (cp_is_letter(cp)) {
            std::size_t start = i;
            while (i < s.size()) {
                cp = utf8_decode(s, i, len);
                if (!cp_is_letter(cp)) break;
                i += len;
            }
            runs.emplace_back(s.substr(start, i - start));
        } else {
            i += len;
        }
    }
    return runs;
}

// Leading citation boilerplate: "sp. zn." (spisova znacka) and "c. j." (cislo
// jednaci) in their common spellings, compared after lowercasing.
inline const std::vector<std::string>& boilerplate_prefixes() {
    static const std::vector<std::string> prefixes = {
        "sp. zn.", "sp.zn.", "sp. zn", "sp zn.", "č. j.", "č.j.", "čj.", "č. j", "zn.",
    };
    return prefixes;
}

inline bool strip_boilerplate_prefix(std::string& s) {
    std::string low = to_lower(s);
    for (const auto& p : boilerplate_prefixes()) {
        if (low.size() >= p.size() && low.compare(0, p.size(), p) == 0) {
            std::size_t cut = p.size();
            while (cut < s.size() && (s[cut] == ':' || is_ascii_space(s[cut]))) ++cut;
            s.erase(0, cut);
            return true;
        }
    }
    return false;
}

// Splits "NUMBER/YY" or "NUMBER/YYYY"; returns false with a reason otherwise.
inline bool parse_number_year(const std::string& tok, uint32_t& number, int& year,
                              std::string& reason) {
    std::size_t slash = tok.find('/');
    if (slash == std::string::npos) {
        reason = "missing '/' between number and year";
        return false;
    }
    std::string num = tok.substr(0, slash);
    std::string yr = tok.substr(slash + 1);
    if (!is_all_digits(num) || num.size() > 7) {
        reason = "malformed sequence number";
        return false;
    }
    if (!is_all_digits(yr) || (yr.size() != 2 && yr.size() != 4)) {
        reason = "year must have 2 or 4 digits";
        return false;
    }
    unsigned long n = std::stoul(num);
    if (n == 0) {
        reason = "sequence number must be positive";
        return false;
    }
    int y = std::stoi(yr);
    if (yr.size() == 2) {
        // Two-digit pivot: the corpus starts in 1993, so 93-99 are the 1900s.
        y = (y >= 93) ? 1900 + y : 2000 + y;
    }
    if (y < 1990 || y > 2100) {
        reason = "year out of range";
        return false;
    }
    number = static_cast<uint32_t>(n);
    year = y;
    return true;
}

inline bool is_cc_senate(const std::string& s) {
    return s == "I" || s == "II" || s == "III" || s == "IV" || s == "Pl";
}

inline std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace detail

// Scans for a registry mark and returns its court; OTHER when no apex-court
// mark is present (lower courts, CJEU, ECtHR, plain prose).
inline CourtClass classify_court(const std::string& raw, const RegistryTable& registry) {
    for (const auto& run : detail::letter_runs(raw)) {
        auto court = registry.court_of(run);
        if (court) return *court;
    }
    return CourtClass::Other;
}

inline std::string format_identifier(const CanonicalIdentifier& c) {
    std::string num_year = std::to_string(c.number) + "/" + std::to_string(c.year);
    if (c.court == CourtClass::CC) return c.senate + ". " + c.registry_mark + " " + num_year;
    return c.senate + " " + c.registry_mark + " " + num_year;
}

// Applies the docket grammar after whitespace canonicalization and boilerplate
// stripping. Failures are encoded in the outcome; this never throws on input.
inline NormalizationOutcome parse_identifier(const std::string& raw, const RegistryTable& registry) {
    NormalizationOutcome out;
    out.raw = raw;

    std::string work = collapse_whitespace(raw);
    while (detail::strip_boilerplate_prefix(work)) {}

    auto unparseable = [&](const std::string& reason) {
        out.kind = NormalizationOutcome::Kind::Unparseable;
        out.reason = reason;
        out.needs_review = true;
        return out;
    };

    CourtClass court = classify_court(work, registry);
    if (court == CourtClass::Other) {
        // Identifier-like strings (they carry a number) bucket as Rest; plain
        // prose with no digits is noise.
        bool has_digit = false;
        for (char ch : work)
            if (is_ascii_digit(ch)) has_digit = true;
        if (!has_digit) return unparseable("no registry mark");
        out.kind = NormalizationOutcome::Kind::OtherCourt;
        return out;
    }

    auto tokens = detail::split_spaces(work);
    CanonicalIdentifier c;
    c.court = court;

    if (court == CourtClass::CC) {
        // Forms: "I. ÚS 123/95", "I.ÚS 123/95", "Pl ÚS 1/93".
        std::string senate, numyear;
        if (tokens.size() == 3 && tokens[1] == "ÚS") {
            senate = tokens[0];
            numyear = tokens[2];
        } else if (tokens.size() == 2) {
            const std::string& head = tokens[0];
            std::size_t dot = head.find('.');
            if (dot == std::string::npos || head.substr(dot + 1) != "ÚS")
                return unparseable("malformed constitutional-court identifier");
            senate = head.substr(0, dot + 1);
            numyear = tokens[1];
        } else {
            return unparseable(tokens.size() < 2 ? "missing number/year"
                                                 : "unexpected text around identifier");
        }
        if (!senate.empty() && senate.back() == '.') senate.pop_back();
        if (!detail::is_cc_senate(senate))
            return unparseable("invalid senate '" + senate + "' (expected I-IV or Pl)");
        std::string reason;
        if (!detail::parse_number_year(numyear, c.number, c.year, reason)) return unparseable(reason);
        c.senate = senate;
        c.registry_mark = "ÚS";
    } else {
        // SC / SAC form: "<senate> <MARK> <number>/<year>".
        if (tokens.size() != 3) {
            if (tokens.size() == 2 && registry.contains(tokens[0]))
                return unparseable("missing senate");
            return unparseable(tokens.size() < 3 ? "missing senate or number/year"
                                                 : "unexpected text around identifier");
        }
        if (!registry.contains(tokens[1])) {
            if (registry.contains(tokens[0])) return unparseable("missing senate");
            return unparseable("registry mark not in expected position");
        }
        if (registry.court_of(tokens[1]) != court)
            return unparseable("registry mark does not match classified court");
        if (!is_all_digits(tokens[0]) || tokens[0].size() > 4)
            return unparseable("invalid senate '" + tokens[0] + "' (expected digits)");
        unsigned long senate_num = std::stoul(tokens[0]);
        if (senate_num == 0) return unparseable("senate must be positive");
        std::string reason;
        if (!detail::parse_number_year(tokens[2], c.number, c.year, reason)) return unparseable(reason);
        c.senate = std::to_string(senate_num);
        c.registry_mark = tokens[1];
    }

    out.kind = NormalizationOutcome::Kind::Canonical;
    out.canonical = c;
    return out;
}

// --- span repair --------------------------------------------------------------

struct RepairConfig {
    std::size_t right_window = 12;  // max bytes appended to finish number/year
    std::size_t left_window = 8;    // max bytes prepended to grab a senate token
    double margin_threshold = 0.5;  // recognizer margins below this go to review
};

struct RepairResult {
    CharRange range;
    std::string repaired;
    bool needs_review = false;
    std::vector<std::string> reasons;
};

namespace detail {

inline const std::vector<std::string>& leading_junk() {
    static const std::vector<std::string> v = {"(", "[", "\"", "'", "„", "«", "‚", ","};
    return v;
}

inline const std::vector<std::string>& trailing_junk() {
    static const std::vector<std::string> v = {")", "]",  "\"", "'", "“", "”",
                                               "»", ",",  ";",  ":", ".", "!",
                                               "?", "…"};
    return v;
}

inline bool eat_prefix(std::string_view text, std::size_t& b, std::size_t e) {
    while (b < e && is_ascii_space(text[b])) ++b;
    for (const auto& j : leading_junk()) {
        if (e - b >= j.size() && text.compare(b, j.size(), j) == 0) {
            b += j.size();
            return true;
        }
    }
    // boilerplate ("sp. zn." etc.), compared lowercased
    std::size_t max_len = std::min<std::size_t>(12, e - b);
    std::string low = to_lower(std::string(text.substr(b, max_len)));
    for (const auto& p : boilerplate_prefixes()) {
        if (low.size() >= p.size() && low.compare(0, p.size(), p) == 0) {
            b += p.size();
            while (b < e && (text[b] == ':' || is_ascii_space(text[b]))) ++b;
            return true;
        }
    }
    return false;
}

inline bool eat_suffix(std::string_view text, std::size_t b, std::size_t& e) {
    while (e > b && is_ascii_space(text[e - 1])) --e;
    for (const auto& j : trailing_junk()) {
        if (e - b >= j.size() && text.compare(e - j.size(), j.size(), j) == 0) {
            e -= j.size();
            return true;
        }
    }
    return false;
}

} // namespace detail

// Repairs a recognized span against the surrounding document text: strips
// citation boilerplate and bracketing punctuation, pulls in a dangling senate
// token on the left, and completes a truncated number/year on the right.
// Extensions (not strips) and low margins set needs_review.
inline RepairResult repair_span(CharRange span, double margin, const std::string& text,
                                const RegistryTable& registry, const RepairConfig& cfg = {}) {
    if (span.end > text.size() || span.begin > span.end) throw DataError("repair: span out of bounds");
    std::size_t b = span.begin, e = span.end;

    while (detail::eat_prefix(text, b, e)) {}
    while (detail::eat_suffix(text, b, e)) {}
    if (b > e) b = e;

    RepairResult result;

    // Left extension: when the span starts at a registry mark, look back for
    // "<digits>" or "<roman|Pl>[.]" within the window.
    {
        auto runs = detail::letter_runs(std::string_view(text).substr(b, e - b));
        if (!runs.empty() && registry.contains(runs.front()) &&
            std::string_view(text).substr(b).starts_with(runs.front())) {
            std::size_t i = b;
            while (i > 0 && text[i - 1] == ' ') --i;
            std::size_t tok_end = i;
            while (i > 0 && (text[i - 1] == '.' || is_ascii_digit(text[i - 1]) ||
                             (text[i - 1] >= 'A' && text[i - 1] <= 'Z') ||
                             (text[i - 1] >= 'a' && text[i - 1] <= 'z')))
                --i;
            std::string tok(text, i, tok_end - i);
            std::string core = tok;
            if (!core.empty() && core.back() == '.') core.pop_back();
            bool is_senate = (is_all_digits(core) && core.size() <= 4) || detail::is_cc_senate(core);
            if (is_senate && tok_end > i && b - i <= cfg.left_window) {
                b = i;
                result.reasons.push_back("left_extension");
            }
        }
    }

    // Right extension: complete a digits-slash-year tail.
    {
        std::size_t digits_end = e;
        std::size_t digits_begin = e;
        while (digits_begin > b && is_ascii_digit(text[digits_begin - 1])) --digits_begin;
        std::size_t tail_digits = digits_end - digits_begin;
        bool slash_before = digits_begin > b && text[digits_begin - 1] == '/' &&
                            digits_begin - 1 > b && is_ascii_digit(text[digits_begin - 2]);

        auto try_extend = [&](std::size_t year_have, std::size_t skip_slash) -> bool {
            // year_have: year digits already inside the span (0 when the slash
            // itself is still missing); skip_slash: 1 when '/' must be consumed.
            for (std::size_t want : {std::size_t{4}, std::size_t{2}}) {
                if (want < year_have) continue;
                std::size_t take = want - year_have;
                if (take == 0) return false; // already complete, nothing to repair
                std::size_t consumed = skip_slash + take;
                if (consumed > cfg.right_window || e + consumed > text.size()) continue;
                std::size_t pos = e;
                if (skip_slash) {
                    if (text[pos] != '/') continue;
                    ++pos;
                }
                bool digits_ok = true;
                for (std::size_t k = 0; k < take; ++k)
                    if (!is_ascii_digit(text[pos + k])) digits_ok = false;
                if (!digits_ok) continue;
                if (pos + take < text.size() && is_ascii_digit(text[pos + take])) continue;
                std::string year_str = std::string(text, digits_begin, year_have) +
                                       std::string(text, pos, take);
                int y = std::stoi(year_str);
                if (year_str.size() == 2) y = (y >= 93) ? 1900 + y : 2000 + y;
                if (y < 1990 || y > 2100) continue;
                e = pos + take;
                result.reasons.push_back("right_extension");
                return true;
            }
            return false;
        };

        if (tail_digits > 0 && slash_before && tail_digits < 4) {
            try_extend(tail_digits, 0);
        } else if (tail_digits > 0 && !slash_before && e < text.size() && text[e] == '/') {
            // span ends in the sequence number; pull in "/YY(YY)"
            digits_begin = e; // year digits all come from the extension
            try_extend(0, 1);
        } else if (tail_digits == 0 && e > b + 1 && text[e - 1] == '/' &&
                   is_ascii_digit(text[e - 2])) {
            // span ends at the slash itself
            try_extend(0, 0);
        }
    }

    bool extended = !result.reasons.empty();
    if (margin < cfg.margin_threshold) result.reasons.push_back("low_margin");
    result.range = {b, e};
    result.repaired = text.substr(b, e - b);
    result.needs_review = extended || margin < cfg.margin_threshold;
    return result;
}

} // namespace czcite
