#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpwm::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int usage = 2;      ///< bad flags, units, script syntax
inline constexpr int parameter = 3;  ///< parameters rejected by the model
inline constexpr int fault = 4;      ///< peripheral fault raised by a script
inline constexpr int io = 5;
}  // namespace exit_code

/// Runs one command. `args` excludes the program name. Errors are reported on
/// `err` as a one-line JSON record {"error": {...}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpwm::cli
