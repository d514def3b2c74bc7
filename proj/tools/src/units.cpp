#include "mpwm/cli/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace mpwm::cli {

namespace {

using Suffix = std::pair<std::string_view, double>;

constexpr std::array<Suffix, 6> time_suffixes{{
    {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15},
}};

constexpr std::array<Suffix, 4> frequency_suffixes{{
    {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

template <std::size_t N>
double parse_quantity(std::string_view text, const std::array<Suffix, N>& suffixes, std::string_view what) {
    const std::string_view s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data()) throw UsageError(fmt::format("cannot parse {} '{}'", what, text));
    if (!std::isfinite(value)) throw UsageError(fmt::format("{} '{}' is not finite", what, text));
    const std::string_view unit = trim(s.substr(static_cast<std::size_t>(ptr - s.data())));
    if (unit.empty()) return value;
    for (const auto& [name, scale] : suffixes) {
        if (unit == name) return value * scale;
    }
    std::string allowed;
    for (const auto& [name, scale] : suffixes) {
        if (!allowed.empty()) allowed += ", ";
        allowed += name;
    }
    throw UsageError(fmt::format("unknown {} unit '{}' in '{}' (allowed: {})", what, unit, text, allowed));
}

}  // namespace

double parse_seconds(std::string_view text) { return parse_quantity(text, time_suffixes, "time"); }

double parse_hertz(std::string_view text) { return parse_quantity(text, frequency_suffixes, "frequency"); }

}  // namespace mpwm::cli
