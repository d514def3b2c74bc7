#include "mpwm/cli/script.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "mpwm/periph.hpp"

namespace mpwm::cli {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

bool parse_unsigned(const std::string& token, std::uint64_t& out) {
    std::string_view s = token;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::uint32_t parse_address(const std::string& token, int line) {
    const std::string name = upper(token);
    if (name == "CTRL") return reg::ctrl;
    if (name == "NBITS") return reg::nbits;
    if (name == "DUTY") return reg::duty;
    if (name == "HRDUTY") return reg::hrduty;
    if (name == "STATUS") return reg::status;
    std::uint64_t v = 0;
    if (!parse_unsigned(token, v) || v > std::numeric_limits<std::uint32_t>::max()) {
        throw ScriptSyntaxError(line, fmt::format("bad address '{}'", token));
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

ScriptSyntaxError::ScriptSyntaxError(int line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

std::vector<ScriptLine> parse_script(std::istream& in) {
    std::vector<ScriptLine> program;
    std::string text;
    int line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream fields(text);
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;

        const std::string op = upper(tokens[0]);
        ScriptLine entry;
        entry.line = line;
        if (op == "WRITE") {
            if (tokens.size() != 3) throw ScriptSyntaxError(line, "expected 'write <addr> <value>'");
            entry.op = ScriptOp::write;
            entry.address = parse_address(tokens[1], line);
            if (!parse_unsigned(tokens[2], entry.value) || entry.value > std::numeric_limits<std::uint32_t>::max()) {
                throw ScriptSyntaxError(line, fmt::format("bad 32-bit value '{}'", tokens[2]));
            }
        } else if (op == "READ") {
            if (tokens.size() != 2) throw ScriptSyntaxError(line, "expected 'read <addr>'");
            entry.op = ScriptOp::read;
            entry.address = parse_address(tokens[1], line);
        } else if (op == "STEP") {
            if (tokens.size() != 2) throw ScriptSyntaxError(line, "expected 'step <cycles>'");
            entry.op = ScriptOp::step;
            if (!parse_unsigned(tokens[1], entry.value) || entry.value == 0) {
                throw ScriptSyntaxError(line, fmt::format("bad cycle count '{}' (must be >= 1)", tokens[1]));
            }
        } else {
            throw ScriptSyntaxError(line, fmt::format("unknown operation '{}'", tokens[0]));
        }
        program.push_back(entry);
    }
    return program;
}

}  // namespace mpwm::cli
