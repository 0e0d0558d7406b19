#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsqa {

// Shortest decimal representation that round-trips the double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Round to n significant digits (value-level, not string-level).
inline double round_sig(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(v)))));
    return std::round(v * mag) / mag;
}

// 4-significant-digit rendering used in generated prose.
inline std::string format_sig4(double v) {
    return format_double(round_sig(v, 4));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Whitespace token count; the token-cost proxy reported by the benchmark.
inline std::size_t whitespace_token_count(std::string_view s) {
    std::size_t n = 0;
    bool in_tok = false;
    for (char c : s) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!ws && !in_tok) ++n;
        in_tok = !ws;
    }
    return n;
}

inline std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_word_char(c)) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// True when edit distance between a and b is at most 1.
inline bool within_edit_distance_one(std::string_view a, std::string_view b) {
    if (a == b) return true;
    std::size_t la = a.size(), lb = b.size();
    if (la > lb) { std::swap(a, b); std::swap(la, lb); }
    if (lb - la > 1) return false;
    std::size_t i = 0;
    while (i < la && a[i] == b[i]) ++i;
    if (la == lb) {
        ++i;
        while (i < la && a[i] == b[i]) ++i;
        return i == la;
    }
    std::size_t j = i;
    while (j < la && a[j] == b[j + 1]) ++j;
    return j == la;
}

// Scans all decimal/scientific numerals in order of appearance.
std::vector<double> extract_numbers(std::string_view text);

// Final numeral in the text, if any.
inline std::optional<double> last_number(std::string_view text) {
    auto nums = extract_numbers(text);
    if (nums.empty()) return std::nullopt;
    return nums.back();
}

} // namespace tsqa
