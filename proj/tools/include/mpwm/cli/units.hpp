#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpwm::cli {

/// Bad command-line input (unknown unit, malformed number, unknown figure id).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seconds from "1ns", "0.5 ms", "2e-9". Bare numbers are seconds.
/// Accepted suffixes: s, ms, us, ns, ps, fs.
double parse_seconds(std::string_view text);

/// Hertz from "100MHz", "250 Hz", "1e8". Bare numbers are hertz.
/// Accepted suffixes: Hz, kHz, MHz, GHz.
double parse_hertz(std::string_view text);

}  // namespace mpwm::cli
