#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "profile.hpp"
#include "reaction.hpp"
#include "rng.hpp"

namespace aclab {

// Noise block of the rescaled stochastic equation
//   dv = (Lap v + f(v)) dt + eps^{gamma+1/4} a(sqrt(eps) x) dW.
struct NoiseSpec {
    double gamma = 0.25;
    double epsilon = 0.05;
    uint64_t master_seed = 1;
    uint32_t path_index = 0;

    double gamma_prime() const { return gamma + 0.25; }
    double amplitude() const;
    void validate() const;  // gamma > -1/4, epsilon in (0,1)
};

// White-noise increment: independent N(0, dt/h) per cell (the cylindrical
// process tested against the normalized grid indicator basis).
Field sample_noise(const GridSpec& grid, double dt, const RngStream& stream, uint32_t step);

// One semi-implicit stochastic step: implicit Laplacian, explicit reaction,
// additive noise eps^{gamma'} a_eps(x) dW injected before the solve.  When
// sup|v| exceeds sup_bound, *valid is cleared (the path is marked, not
// aborted).  amplitude_override >= 0 replaces the NoiseSpec amplitude (0
// recovers the deterministic step exactly).
Field step_spde(const Field& v, double dt, const NoiseSpec& spec, const ReactionTerm& rt,
                const RngStream& stream, uint32_t step, bool* valid = nullptr,
                double sup_bound = 2.0, double amplitude_override = -1.0);

struct InterfaceSeries {
    // (macroscopic time, rescaled front position sqrt(eps)*eta)
    std::vector<std::pair<double, double>> samples;
};

struct SpdePath {
    std::vector<std::pair<double, Field>> checkpoints;  // optional full fields
    InterfaceSeries interface;
    std::vector<double> dist_series;  // dist to the front family per interface sample
    std::vector<std::pair<double, double>> sup_series;  // (t_macro, sup|state|)
    Field final_state;  // state at the last step taken (halt or horizon)
    bool stopped = false;
    double stop_time = 0.0;  // macroscopic, meaningful when stopped
    double sup_dist = 0.0;   // max observed sup-distance to the front family
    bool valid = true;       // sup-bound monitor never tripped
    uint64_t noise_checksum = 0;  // FNV-1a over every consumed increment
    uint64_t master_seed = 0;
    uint32_t path_index = 0;
};

struct SimConfig {
    NoiseSpec noise;
    double xi0 = 0.0;         // macroscopic initial front position
    double horizon_T = 1.0;   // macroscopic horizon
    double horizon_internal = 0.0;  // direct internal horizon (overrides when > 0)
    double cadence_T = 0.01;  // macroscopic sampling cadence
    double kappa = 0.2;       // stopping threshold dist > eps^{gamma'-kappa}
    double spacing = 0.1;
    double dt = 0.0;          // 0 = min(0.01, 0.5/sup f')
    double t_smooth = 2.0;    // micro-flow before reading the linear center
    double sup_bound = 2.0;
    bool with_checkpoints = false;
    bool track_interface = true;   // false for the linear equation
};

// Simulation grid: [-L, L] with L = eps^{-1/2} + 10 rounded up to the lattice.
GridSpec simulation_grid(const NoiseSpec& spec, double spacing, Boundary boundary);
// Internal clock: macroscopic T corresponds to T * eps^{-2 gamma - 3/2}.
double internal_time_scale(const NoiseSpec& spec);
double resolve_dt(const SimConfig& cfg, const ReactionTerm& rt);

// Full nonlinear path started from the front at xi0/sqrt(eps); interface
// samples at the macroscopic cadence, stopping (with frozen interface value)
// once the distance to the front family exceeds eps^{gamma'-kappa}.
SpdePath simulate_path(const SimConfig& cfg, const Profile& p, const ReactionTerm& rt);

// Linear equation dX = Lap X dt + eps^{gamma'} a_eps dW, X0 = 0, zero
// Dirichlet boundary; same noise purpose/stream as simulate_path so paths
// with equal seeds consume identical increments.
SpdePath simulate_linear(const SimConfig& cfg);

struct DecomposeReport {
    std::vector<double> times;      // macroscopic checkpoint times
    std::vector<double> dist_w;     // dist(v - X, front family)
    std::vector<double> sup_x;      // sup|X|
    std::vector<double> sup_r;      // sup|f(v) - f(v - X)|
    std::vector<double> mvt_bound;  // sup|f'| * sup|X| on the visited range
    bool bound_ok = true;
};

// Pathwise decomposition v = w + X for shared-noise path pairs; verifies the
// mean-value bound on the remainder R = f(v) - f(w).
DecomposeReport decompose_path(const SpdePath& full, const SpdePath& linear,
                               const ReactionTerm& rt, const Profile& p);

// Continuum Ito-isometry oracle for the linear equation:
//   E X(t,x)^2 = eps^{2 gamma'} int_0^t int q_{t-s}(x-y)^2 a(sqrt(eps) y)^2 dy ds.
double linear_variance_oracle(double t, double x, double epsilon, double gamma);

}  // namespace aclab
