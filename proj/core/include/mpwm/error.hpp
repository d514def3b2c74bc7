#pragma once

#include <stdexcept>
#include <string>

namespace mpwm {

/// Raised when an argument violates a documented bound. The message names the bound.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mpwm
