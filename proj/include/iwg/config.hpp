#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iwg/study.hpp"

namespace iwg {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view s, const std::string& what)
{
    s = trim(s);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorKind::invalid_config, "cannot parse " + what + " from '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// "A..B" or a single level "A".
inline std::pair<int, int> parse_levels(std::string_view s)
{
    const auto dots = s.find("..");
    if (dots == std::string_view::npos) {
        const int l = detail::parse_number<int>(s, "level");
        return {l, l};
    }
    return {detail::parse_number<int>(s.substr(0, dots), "level"),
            detail::parse_number<int>(s.substr(dots + 2), "level")};
}

/// "A1,A2;A1,A2;..."
inline std::vector<std::pair<double, double>> parse_coeffs(std::string_view s)
{
    std::vector<std::pair<double, double>> out;
    while (!s.empty()) {
        const auto semi = s.find(';');
        const std::string_view pair = s.substr(0, semi);
        const auto comma = pair.find(',');
        if (comma == std::string_view::npos)
            throw Error(ErrorKind::invalid_config,
                        "coefficient pair '" + std::string(pair) + "' must be A1,A2");
        out.emplace_back(detail::parse_number<double>(pair.substr(0, comma), "coefficient"),
                         detail::parse_number<double>(pair.substr(comma + 1), "coefficient"));
        if (semi == std::string_view::npos)
            break;
        s.remove_prefix(semi + 1);
    }
    if (out.empty())
        throw Error(ErrorKind::invalid_config, "no coefficient pairs given");
    return out;
}

inline SolverConfig::Method parse_solver(std::string_view s)
{
    if (s == "cholesky")
        return SolverConfig::Method::direct_cholesky;
    if (s == "cg")
        return SolverConfig::Method::cg;
    throw Error(ErrorKind::invalid_config, "solver must be cholesky or cg, got '" + std::string(s) + "'");
}

inline JumpGeometry parse_jump(std::string_view s)
{
    if (s == "arc")
        return JumpGeometry::arc;
    if (s == "chord")
        return JumpGeometry::chord;
    throw Error(ErrorKind::invalid_config, "jump must be arc or chord, got '" + std::string(s) + "'");
}

} // namespace iwg
