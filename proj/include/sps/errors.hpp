#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sps {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated precondition on an argument (non-positive radius, t <= 0, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

// Malformed field file or config text.
struct FormatError : Error {
    using Error::Error;
};

// Numerical failure that cannot be reported as a non-converged result.
struct SolverError : Error {
    using Error::Error;
};

// Non-fatal diagnostics (truncation, tail mass, resolution). The default
// handler prints to stderr; tests install their own to capture messages.
using WarningHandler = std::function<void(const std::string&)>;
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace sps
