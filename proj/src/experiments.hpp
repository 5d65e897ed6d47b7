#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"
#include "manifest.hpp"

namespace aclab {

// One experiment invocation: a verb, its configuration, an output directory
// and the reproducibility inputs.  The CLI and the C API both funnel through
// run_experiment so every entry point produces identical artifacts.
struct ExperimentRequest {
    std::string verb;
    Config config;
    std::string out_dir;
    uint64_t seed = 1;
    int threads = 0;  // 0 = hardware default
};

// Known verbs: profile, spectrum, coeffs, dzeta, kernel, flow, simulate,
// compare, verify-identities, closeness-scan.
//
// Writes every output file atomically into out_dir, then record.json (file
// hashes included) and report.md.  Statistical/accuracy gates never throw:
// they clear gates_passed on the returned record (exit code 2 at the process
// boundary).  Bad inputs throw ValidationError, numerical breakdowns
// NumericError.
RunRecord run_experiment(const ExperimentRequest& req);

}  // namespace aclab
