#pragma once

// Small UTF-8 and text helpers. Unicode handling is deliberately limited to what
// Czech court texts need: ASCII plus the Latin-1 / Latin Extended-A letters of the
// Czech alphabet. No locale, no ICU, fully deterministic.

#include <cstdint>
#include <string>
#include <string_view>

namespace czcite {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Decodes the code point starting at byte offset i; writes its byte length into len.
// Malformed bytes decode as themselves with length 1, so scanning never stalls.
inline uint32_t utf8_decode(std::string_view s, std::size_t i, std::size_t& len) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        len = 1;
        return b0;
    }
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        len = 2;
        return ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        len = 3;
        return ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
               (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        len = 4;
        return ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
               ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
               (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    }
    len = 1;
    return b0;
}

inline void utf8_encode(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Latin Extended-A pairs letters as upper/lower neighbors, but the parity of
// the uppercase member flips across three sub-ranges (and a few lone letters
// break the pattern entirely).
inline bool cp_is_ext_a_upper(uint32_t cp) {
    if (cp >= 0x100 && cp <= 0x137) return cp % 2 == 0; // Ā..Ķ
    if (cp >= 0x139 && cp <= 0x148) return cp % 2 == 1; // Ĺ..Ň
    if (cp >= 0x14A && cp <= 0x177) return cp % 2 == 0; // Ŋ..Ŷ
    if (cp == 0x178) return true;                       // Ÿ (pairs with U+00FF)
    if (cp >= 0x179 && cp <= 0x17E) return cp % 2 == 1; // Ź Ż Ž
    return false;
}

inline bool cp_is_upper(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return true;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true; // Latin-1 uppercase
    return cp >= 0x100 && cp <= 0x17F && cp_is_ext_a_upper(cp);
}

inline bool cp_is_lower(uint32_t cp) {
    if (cp >= 'a' && cp <= 'z') return true;
    if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return true;
    return cp >= 0x100 && cp <= 0x17F && !cp_is_ext_a_upper(cp); // incl. ĸ ŉ ſ
}

inline bool cp_is_letter(uint32_t cp) { return cp_is_upper(cp) || cp_is_lower(cp); }

inline uint32_t cp_to_lower(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x100 && cp <= 0x17E && cp_is_ext_a_upper(cp)) return cp + 1;
    return cp;
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len;
        uint32_t cp = utf8_decode(s, i, len);
        utf8_encode(cp_to_lower(cp), out);
        i += len;
    }
    return out;
}

// First code point of s is an uppercase letter or an ASCII digit.
inline bool starts_upper_or_digit(std::string_view s) {
    if (s.empty()) return false;
    if (is_ascii_digit(s[0])) return true;
    std::size_t len;
    uint32_t cp = utf8_decode(s, 0, len);
    return cp_is_upper(cp);
}

// Compressed token shape: uppercase runs -> 'X', lowercase -> 'x', digits -> '9',
// anything else kept verbatim (one symbol per run). "2045/2012" -> "9/9", "Cdo" -> "Xx".
inline std::string token_shape(std::string_view tok) {
    std::string out;
    char prev = 0;
    std::size_t i = 0;
    while (i < tok.size()) {
        std::size_t len;
        uint32_t cp = utf8_decode(tok, i, len);
        char cls;
        if (cp_is_upper(cp)) cls = 'X';
        else if (cp_is_lower(cp)) cls = 'x';
        else if (cp < 128 && is_ascii_digit(static_cast<char>(cp))) cls = '9';
        else if (cp < 128) cls = static_cast<char>(cp);
        else cls = '?';
        if (cls != prev || (cls != 'X' && cls != 'x' && cls != '9')) out.push_back(cls);
        prev = cls;
        i += len;
    }
    return out;
}

inline std::string_view trim_view(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

// Collapses all whitespace runs to single spaces and trims the ends.
inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true; // swallow leading whitespace
    for (char c : s) {
        if (is_ascii_space(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_ws = false;
        }
    }
    return out;
}

inline bool is_all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_ascii_digit(c)) return false;
    return true;
}

} // namespace czcite
