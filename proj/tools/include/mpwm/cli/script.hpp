#pragma once

// Line-oriented register program for the peripheral emulator:
//
//   # comment
//   write CTRL 0x31
//   read 0x10
//   step 4096
//
// Addresses are numbers (decimal or 0x-hex) or register names.

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpwm::cli {

enum class ScriptOp { write, read, step };

struct ScriptLine {
    int line = 0;
    ScriptOp op = ScriptOp::step;
    std::uint32_t address = 0;
    std::uint64_t value = 0;  ///< written value or step count
};

class ScriptSyntaxError : public std::runtime_error {
public:
    ScriptSyntaxError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

std::vector<ScriptLine> parse_script(std::istream& in);

}  // namespace mpwm::cli
