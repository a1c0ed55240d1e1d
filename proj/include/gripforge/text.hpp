#pragma once

// Small text helpers shared by the plain-text file formats.

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gripforge/error.hpp"

namespace gripforge::text {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        auto j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

// Shortest decimal form that reads back to the identical double.
inline std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, p);
}

// Parses "<magic> key=value key=value ..." into a key map.
inline std::map<std::string, std::string, std::less<>> parse_header(std::string_view line,
                                                                    std::string_view magic,
                                                                    std::size_t line_no) {
    line = trim(line);
    if (!line.starts_with(magic)) {
        throw ParseError(line_no, "expected header '" + std::string(magic) + "'");
    }
    std::map<std::string, std::string, std::less<>> kv;
    for (auto token : split_ws(line.substr(magic.size()))) {
        auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParseError(line_no, "bad header field '" + std::string(token) + "'");
        }
        kv.emplace(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
    }
    return kv;
}

// Stable 64-bit FNV-1a, used wherever a hash must not depend on the toolchain.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace gripforge::text
