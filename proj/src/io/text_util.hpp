#pragma once

#include "seebench/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seebench::io::detail {

inline std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(delim, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) return out;
        pos = next + 1;
    }
}

inline double parse_double(std::string_view s, std::string_view what, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(fmt::format("bad {} '{}'", what, s), line);
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s, std::string_view what, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(fmt::format("bad {} '{}'", what, s), line);
    }
    return v;
}

inline bool parse_flag(std::string_view s, std::string_view what, std::size_t line) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ParseError(fmt::format("bad {} flag '{}'", what, s), line);
}

/// Header tokens of the form key=value after a fixed magic word.
struct KeyValues {
    std::vector<std::pair<std::string_view, std::string_view>> items;

    std::string_view get(std::string_view key, std::size_t line) const {
        for (const auto& [k, v] : items) {
            if (k == key) return v;
        }
        throw ParseError(fmt::format("header is missing '{}'", key), line);
    }
};

inline KeyValues parse_key_values(std::string_view text, std::size_t line) {
    KeyValues kv;
    for (auto token : split(text, ' ')) {
        if (token.empty()) continue;
        auto eq = token.find('=');
        if (eq == std::string_view::npos) throw ParseError(fmt::format("bad header token '{}'", token), line);
        kv.items.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    return kv;
}

inline void check_token(std::string_view value, std::string_view what) {
    if (value.empty() || value.find_first_of(" \t\r\n,=") != std::string_view::npos) {
        throw DomainError(fmt::format("{} '{}' must be non-empty without spaces, commas or '='", what, value));
    }
}

}  // namespace seebench::io::detail
