#pragma once

#include <stdexcept>

namespace morphlex {

// Unreadable or malformed input (files, encodings, wire formats).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input is structurally valid but too small or degenerate to operate on.
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameter values or configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace morphlex
