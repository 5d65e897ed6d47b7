#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace aclab {

// Euler-Maruyama configuration for the limit equation
//   d xi = alpha2 a(xi) a'(xi) dt + alpha1 a(xi) dB.
struct SdeConfig {
    double alpha1 = 1.0;
    double alpha2 = 0.0;
    double xi0 = 0.0;
    double dt = 1e-3;
    double horizon = 1.0;
    uint64_t master_seed = 1;
};

// One Euler-Maruyama increment using the (step, 0) slot of the stream.
double step_sde(double xi, double dt, const SdeConfig& cfg, const RngStream& stream,
                uint32_t step);

// Path values at the requested times (each rounded to the step lattice).
std::vector<double> sde_path(const SdeConfig& cfg, uint32_t path_index,
                             const std::vector<double>& sample_times);

// Terminal values of n_paths independent paths (deterministic by seed).
std::vector<double> ensemble_terminal(const SdeConfig& cfg, int n_paths, int threads = 0);

// result[j][path] = xi at times[j]; one pass over each path.
std::vector<std::vector<double>> ensemble_at_times(const SdeConfig& cfg, int n_paths,
                                                   const std::vector<double>& times,
                                                   int threads = 0);

}  // namespace aclab
