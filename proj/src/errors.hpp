#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

// Process exit codes used by the CLI and the C API.
enum ExitCode : int {
    exit_ok = 0,
    exit_gate_failure = 2,
    exit_validation = 3,
    exit_numeric = 4,
};

// Bad inputs: inconsistent grids, out-of-range parameters, malformed config.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical trouble: non-convergence, sup-bound violations, overflow.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A statistical or accuracy gate of an experiment failed (data was produced).
struct GateFailure : std::runtime_error {
    explicit GateFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aclab
