#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "errors.hpp"
#include "flow.hpp"
#include "profile.hpp"
#include "spde.hpp"

using namespace aclab;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.noise.epsilon = 0.05;
    cfg.noise.gamma = 0.25;
    cfg.noise.master_seed = 5;
    cfg.horizon_T = 0.002;
    cfg.cadence_T = 0.0005;
    cfg.spacing = 0.2;
    cfg.t_smooth = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("noise spec validation enumerates violations") {
    NoiseSpec ok;
    CHECK_NOTHROW(ok.validate());
    NoiseSpec bad;
    bad.gamma = -0.3;
    bad.epsilon = 1.5;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("gamma"), ValidationError);
    try {
        bad.validate();
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
    }
    CHECK(ok.amplitude() == doctest::Approx(std::pow(ok.epsilon, ok.gamma_prime())));
}

TEST_CASE("white-noise increments have variance dt/h per cell") {
    GridSpec g = build_grid(4.0, 0.1, Boundary::dirichlet_zero);
    RngStream stream(2, RngPurpose::spde_noise, 0);
    const double dt = 0.01;
    double sum2 = 0.0;
    int count = 0;
    for (uint32_t step = 0; step < 200; ++step) {
        Field w = sample_noise(g, dt, stream, step);
        for (int i = 0; i < w.size(); ++i) {
            sum2 += w[i] * w[i];
            ++count;
        }
    }
    CHECK(sum2 / count == doctest::Approx(dt / g.spacing).epsilon(0.02));
    // Determinism: same (stream, step) reproduces the same field.
    Field a = sample_noise(g, dt, stream, 7);
    Field b = sample_noise(g, dt, stream, 7);
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("zero-amplitude stochastic step equals the deterministic step") {
    GridSpec g = build_grid(8.0, 0.1, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    Field v = translate_profile(p, g, 0.3);
    NoiseSpec spec;
    RngStream stream(3, RngPurpose::spde_noise, 0);
    bool valid = true;
    Field a = step_spde(v, 0.01, spec, rt, stream, 0, &valid, 2.0, 0.0);
    Field b = step_deterministic(v, 0.01, rt);
    REQUIRE(valid);
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("step monitor marks runaway paths instead of throwing") {
    GridSpec g = build_grid(8.0, 0.1, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Field v(g, 1.9);
    NoiseSpec spec;
    RngStream stream(3, RngPurpose::spde_noise, 0);
    bool valid = true;
    CHECK_NOTHROW(step_spde(v, 0.01, spec, rt, stream, 0, &valid, 1.5, 0.0));
    CHECK_FALSE(valid);
}

TEST_CASE("simulation grid and internal clock") {
    NoiseSpec spec;
    spec.epsilon = 0.04;
    GridSpec g = simulation_grid(spec, 0.1, Boundary::dirichlet_pm1);
    CHECK(g.half_length >= 1.0 / std::sqrt(spec.epsilon) + 10.0);
    CHECK(g.half_length < 1.0 / std::sqrt(spec.epsilon) + 10.0 + 0.1 + 1e-12);
    // T_internal = T * eps^{-2 gamma - 3/2}.
    spec.gamma = 0.25;
    CHECK(internal_time_scale(spec) == doctest::Approx(std::pow(0.04, -2.0)).epsilon(1e-12));
}

TEST_CASE("interface series starts at xi0 and aligns with the distance series") {
    ReactionTerm rt = ReactionTerm::cubic();
    SimConfig cfg = small_config();
    cfg.xi0 = 0.3;
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
    Profile p = solve_profile(rt, g);
    SpdePath path = simulate_path(cfg, p, rt);
    REQUIRE(path.valid);
    REQUIRE_FALSE(path.interface.samples.empty());
    CHECK(path.interface.samples.front().first == doctest::Approx(0.0));
    CHECK(path.interface.samples.front().second == doctest::Approx(0.3).epsilon(0.01));
    CHECK(path.dist_series.size() == path.interface.samples.size());
    CHECK(path.sup_dist >= *std::max_element(path.dist_series.begin(), path.dist_series.end()) -
                               1e-12);
    CHECK(path.final_state.size() == g.n_points);
    // Cadence grid is uniform out to the horizon.
    for (size_t j = 1; j < path.interface.samples.size(); ++j)
        CHECK(path.interface.samples[j].first - path.interface.samples[j - 1].first ==
              doctest::Approx(cfg.cadence_T).epsilon(1e-9));
    CHECK(path.interface.samples.back().first == doctest::Approx(cfg.horizon_T).epsilon(1e-9));
}

TEST_CASE("paths are reproducible and distinct across indices") {
    ReactionTerm rt = ReactionTerm::cubic();
    SimConfig cfg = small_config();
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
    Profile p = solve_profile(rt, g);
    SpdePath a = simulate_path(cfg, p, rt);
    SpdePath b = simulate_path(cfg, p, rt);
    CHECK(a.noise_checksum == b.noise_checksum);
    REQUIRE(a.interface.samples.size() == b.interface.samples.size());
    for (size_t j = 0; j < a.interface.samples.size(); ++j)
        CHECK(a.interface.samples[j].second == b.interface.samples[j].second);
    SimConfig other = cfg;
    other.noise.path_index = 1;
    SpdePath c = simulate_path(other, p, rt);
    CHECK(c.noise_checksum != a.noise_checksum);
}

TEST_CASE("linear equation reproduces the Ito-isometry variance") {
    SimConfig cfg;
    cfg.noise.epsilon = 0.05;
    cfg.noise.gamma = 0.25;
    cfg.noise.master_seed = 21;
    cfg.horizon_internal = 1.0;  // internal time, short
    cfg.spacing = 0.1;
    cfg.track_interface = false;
    const int n_paths = 300;
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_zero);
    const int mid = g.n_points / 2;
    double sum2 = 0.0;
    for (int k = 0; k < n_paths; ++k) {
        SimConfig c = cfg;
        c.noise.path_index = static_cast<uint32_t>(k);
        SpdePath path = simulate_linear(c);
        REQUIRE(path.final_state.size() == g.n_points);
        sum2 += path.final_state[mid] * path.final_state[mid];
    }
    const double mc = sum2 / n_paths;
    const double oracle = linear_variance_oracle(1.0, 0.0, cfg.noise.epsilon, cfg.noise.gamma);
    // 300 paths: standard error about sqrt(2/300) = 8%; gate at 3 sigma.
    CHECK(mc == doctest::Approx(oracle).epsilon(0.25));
}

TEST_CASE("shared-noise decomposition obeys the mean-value bound") {
    ReactionTerm rt = ReactionTerm::cubic();
    SimConfig cfg = small_config();
    cfg.with_checkpoints = true;
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
    Profile p = solve_profile(rt, g);
    SpdePath full = simulate_path(cfg, p, rt);
    SimConfig lin = cfg;
    lin.track_interface = false;
    SpdePath linear = simulate_linear(lin);
    CHECK(full.noise_checksum == linear.noise_checksum);  // identical increments
    DecomposeReport rep = decompose_path(full, linear, rt, p);
    REQUIRE_FALSE(rep.times.empty());
    CHECK(rep.bound_ok);
    for (size_t j = 0; j < rep.times.size(); ++j)
        CHECK(rep.sup_r[j] <= rep.mvt_bound[j] * (1.0 + 1e-9));
    // Mismatched seeds must be refused.
    SimConfig wrong = cfg;
    wrong.noise.master_seed = 999;
    wrong.track_interface = false;
    SpdePath other = simulate_linear(wrong);
    CHECK_THROWS_AS(decompose_path(full, other, rt, p), ValidationError);
}
