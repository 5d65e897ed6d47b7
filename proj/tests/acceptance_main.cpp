// Acceptance checks for the front-dynamics laboratory.  Each check prints a
// single PASS/FAIL line; the exit status is the number of failures.  With
// arguments, only the listed check numbers run (development convenience).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "correctors.hpp"
#include "cutoff.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "flow.hpp"
#include "kernels.hpp"
#include "linop.hpp"
#include "partitions.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "sde.hpp"
#include "spde.hpp"
#include "stats.hpp"

using namespace aclab;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("check %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Field bumps_on_front(const Profile& p, const GridSpec& g, double theta,
                     const std::vector<std::array<double, 3>>& bumps) {
    Field v = translate_profile(p, g, theta);
    for (const auto& [amp, ctr, width] : bumps) {
        for (int i = 0; i < g.n_points; ++i) {
            const double z = (g.x(i) - ctr) / width;
            v[i] += amp * std::exp(-0.5 * z * z);
        }
    }
    return v;
}

std::vector<std::array<double, 3>> random_bumps(RngStream& rng, uint32_t trial, int count,
                                                double amp_scale, double spread) {
    std::vector<std::array<double, 3>> out;
    for (int b = 0; b < count; ++b) {
        const double amp = amp_scale * rng.normal(trial, 3u * static_cast<uint32_t>(b));
        const double ctr = spread * (rng.uniform(trial, 3u * static_cast<uint32_t>(b) + 1) - 0.5);
        const double width =
            0.8 + 0.8 * rng.uniform(trial, 3u * static_cast<uint32_t>(b) + 2);
        out.push_back({amp, ctr, width});
    }
    return out;
}

// ---------------------------------------------------------------------------

void check01_profile() {
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec g = build_grid(20.0, 0.01, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    double sup = 0.0;
    for (int i = 0; i < g.n_points; ++i)
        sup = std::max(sup, std::abs(p.m[i] - std::tanh(g.x(i) / std::sqrt(2.0))));
    const double secs = seconds_since(t0);
    report(1, sup <= 1e-6 && secs < 1.0,
           fmt("profile sup err %.3e (<=1e-6), %.2fs (<1s)", sup, secs));
}

void check02_norm_and_alpha1() {
    GridSpec g = build_grid(20.0, 0.01, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    const double grid_norm2 = inner(p.m1, p.m1);
    const double oracle =
        adaptive_simpson([&](double x) { return p.m1_at(x) * p.m1_at(x); }, -20.0, 20.0, 1e-10);
    const double exact = 2.0 * std::sqrt(2.0) / 3.0;
    const double a1 = alpha1(p, rt);
    const bool pass = std::abs(grid_norm2 - oracle) <= 1e-6 &&
                      std::abs(grid_norm2 - exact) <= 1e-6 && std::abs(a1 - 1.029884) <= 1e-4;
    report(2, pass,
           fmt("|m'|^2 grid %.12f vs oracle %.12f vs closed form %.12f; alpha1 %.7f", grid_norm2,
               oracle, exact, a1));
}

void check03_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    GridSpec g = build_grid(30.0, 0.01, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    LinearizedOperator op = assemble(p, rt);
    SpectrumResult s = spectrum(op, 2);
    Field mp = translate_profile_d1(p, op.grid, 0.0);
    const double cosine =
        std::abs(inner(s.eigenfields[0], mp)) / (norm_l2(s.eigenfields[0]) * norm_l2(mp));
    const double secs = seconds_since(t0);
    const bool pass = std::abs(s.eigenvalues[0]) <= 1e-6 &&
                      std::abs(s.eigenvalues[1] - 1.5) <= 2e-3 && cosine >= 1.0 - 1e-8 &&
                      secs < 60.0;
    report(3, pass,
           fmt("bottom %.3e, gap %.6f, cosine deficit %.3e, %.1fs", s.eigenvalues[0],
               s.eigenvalues[1], 1.0 - cosine, secs));
}

void check04_semigroup_rate() {
    GridSpec g = build_grid(16.0, 0.05, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    LinearizedOperator op = assemble(p, rt);
    RngStream rng(101, RngPurpose::generic_draws, 0);
    double worst = 0.0;
    bool pass = true;
    for (uint32_t trial = 0; trial < 10; ++trial) {
        // Random smooth data: wide bumps near the front, so the draw lives at
        // the smoothness scale of the slow modes.  (Rough draws are dominated
        // by continuum modes above the gap over any finite fit window.)
        Field v(op.grid);
        for (int b = 0; b < 3; ++b) {
            const double amp = rng.normal(trial, 3u * static_cast<uint32_t>(b));
            const double ctr = 3.0 * (rng.uniform(trial, 3u * static_cast<uint32_t>(b) + 1) - 0.5);
            const double width =
                0.9 + 0.7 * rng.uniform(trial, 3u * static_cast<uint32_t>(b) + 2);
            for (int i = 0; i < v.size(); ++i) {
                const double z = (op.grid.x(i) - ctr) / width;
                v[i] += amp * std::exp(-0.5 * z * z);
            }
        }
        Field w = project_P_perp(v, p);
        std::vector<double> ts, ys;
        Field cur = semigroup_apply(op, 1.0, w);
        for (double t = 1.0; t < 5.0 + 1e-9; t += 0.5) {
            ts.push_back(t);
            ys.push_back(std::log(norm_l2(cur)));
            cur = semigroup_apply(op, 0.5, cur);
        }
        LineFit fit = fit_line(ts, ys);
        const double rate = -fit.slope;
        worst = std::max(worst, std::abs(rate - 1.5) / 1.5);
        pass = pass && std::abs(rate - 1.5) <= 0.10 * 1.5;
    }
    report(4, pass, fmt("10 projected draws, worst rate deviation %.1f%% (<=10%%)", 100.0 * worst));
}

void check05_kernel_collapse() {
    GridSpec g = build_grid(16.0, 0.05, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    // A numerically stationary base keeps the kernel's background frozen, so
    // the slice decomposes exactly along the discrete eigenmodes.
    Field front = discrete_steady_state(rt, g, 1e-13, &p);
    KernelEngine eng(front, p, rt);
    Field mp = translate_profile_d1(p, eng.grid(), 0.0);
    const double mp2 = inner(mp, mp);
    // Discrete ground mode for the rate fit: the m'-table projection leaves a
    // stencil-order floor that would flatten the tail of the fit.
    LinearizedOperator op = assemble(p, rt);
    Field phi0 = spectrum(op, 1).eigenfields[0];
    const double phi0_n2 = inner(phi0, phi0);
    double worst_sup = 0.0;
    double worst_rate = 1e9;
    for (double y : {-5.0, -2.5, 0.0, 2.5, 5.0}) {
        std::vector<double> ts, ys;
        for (double t = 2.0; t <= 10.0 + 1e-9; t += 1.0) {
            KernelSlice s = eng.first_kernel(y, t);
            const double coef = inner(s.slice, mp) / mp2;
            double resid_sup = 0.0;
            for (int i = 0; i < s.slice.size(); ++i)
                resid_sup = std::max(resid_sup, std::abs(s.slice[i] - coef * mp[i]));
            if (t > 10.0 - 1e-9) worst_sup = std::max(worst_sup, resid_sup);
            const double c0 = inner(s.slice, phi0) / phi0_n2;
            double resid_l2 = 0.0;
            for (int i = 0; i < s.slice.size(); ++i) {
                const double r = s.slice[i] - c0 * phi0[i];
                resid_l2 += r * r;
            }
            resid_l2 = std::sqrt(resid_l2 * g.spacing);
            if (resid_l2 > 1e-14) {
                ts.push_back(t);
                ys.push_back(std::log(resid_l2));
            }
        }
        if (ts.size() >= 2) worst_rate = std::min(worst_rate, -fit_line(ts, ys).slope);
    }
    report(5, worst_sup <= 1e-3 && worst_rate >= 0.8,
           fmt("worst residual sup at t=10: %.3e (<=1e-3), slowest decay rate %.2f (>=0.8)",
               worst_sup, worst_rate));
}

void check06_dzeta_fd() {
    GridSpec g = build_grid(16.0, 0.05, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    // Normalization at the front itself.
    Field front = translate_profile(p, g, 0.0);
    KernelEngine base_eng(front, p, rt);
    Field dz0 = base_eng.dzeta();
    Field mp = translate_profile_d1(p, base_eng.grid(), 0.0);
    const double pairing = inner(dz0, mp);

    RngStream rng(66, RngPurpose::generic_draws, 0);
    const double s = 0.002;  // probe mass; sup amplitude s/h = 0.04
    double worst_rel = 0.0;
    for (uint32_t state = 0; state < 5; ++state) {
        Field v = bumps_on_front(p, g, 0.0, random_bumps(rng, state, 2, 0.02, 3.0));
        KernelEngine eng(v, p, rt);
        Field dz = eng.dzeta();
        for (int k = 0; k < 10; ++k) {
            const double y = -2.7 + 0.6 * k;  // probes inside the front core
            const int iy = static_cast<int>(std::lround(g.index_of(y)));
            Field up = v, dn = v;
            up[iy] += s / g.spacing;
            dn[iy] -= s / g.spacing;
            // The semi-implicit flow's variation carries an O(dt) bias from
            // the explicit reaction, so extrapolate the probe in dt.
            auto fd_at = [&](double dt) {
                return (zeta(up, p, rt, 12.0, 1e-10, dt) - zeta(dn, p, rt, 12.0, 1e-10, dt)) /
                       (2.0 * s);
            };
            const double fd = 2.0 * fd_at(0.0025) - fd_at(0.005);
            worst_rel = std::max(worst_rel, std::abs(dz[iy] - fd) / std::abs(fd));
        }
    }
    report(6, worst_rel <= 1e-2 && std::abs(pairing + 1.0) <= 1e-4,
           fmt("worst FD mismatch %.2e (<=1e-2); <Dzeta(front), m'> = %.6f (+-1e-4)", worst_rel,
               pairing));
}

void check07_psi1() {
    GridSpec g = build_grid(16.0, 0.1, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile p = solve_profile(rt, g);
    double worst_family = 0.0;
    for (double theta : {0.0, 0.7, -1.3})
        worst_family =
            std::max(worst_family, std::abs(psi1(translate_profile(p, g, theta), p, rt)));
    // Reflection antisymmetry.
    RngStream rng(7, RngPurpose::generic_draws, 0);
    Field v = bumps_on_front(p, g, 0.0, random_bumps(rng, 0, 2, 0.03, 3.0));
    Field w(g);
    for (int i = 0; i < v.size(); ++i) w[i] = -v[v.size() - 1 - i];
    const double anti = std::abs(psi1(v, p, rt) + psi1(w, p, rt));
    // One uniform constant bounds |psi1| / dist over a 20-state family.
    double worst_ratio = 0.0;
    for (uint32_t k = 0; k < 20; ++k) {
        Field u = bumps_on_front(p, g, 0.2 * (k % 5) - 0.4,
                                 random_bumps(rng, 100 + k, 2, 0.005 + 0.002 * (k % 8), 3.0));
        const double d = dist_to_manifold(u, p);
        if (d < 1e-6) continue;
        worst_ratio = std::max(worst_ratio, std::abs(psi1(u, p, rt)) / d);
    }
    const bool pass = worst_family <= 1e-4 && anti <= 1e-6 && worst_ratio <= 5.0;
    report(7, pass,
           fmt("on-family sup %.2e (<=1e-4), reflection residual %.2e (<=1e-6), |psi1|/dist <= "
               "%.2f (<=5)",
               worst_family, anti, worst_ratio));
}

void check08_orthogonality() {
    ReactionTerm rt = ReactionTerm::cubic();
    GridSpec coarse = build_grid(16.0, 0.1, Boundary::dirichlet_pm1);
    GridSpec fine = build_grid(16.0, 0.05, Boundary::dirichlet_pm1);
    Profile pc = solve_profile(rt, coarse);
    Profile pf = solve_profile(rt, fine);
    RngStream rng(88, RngPurpose::generic_draws, 0);
    bool pass = true;
    double worst_rel = 0.0;
    std::vector<double> ratios;
    for (uint32_t k = 0; k < 20; ++k) {
        const auto bumps = random_bumps(rng, k, 2, 0.02, 3.0);
        Field vc = bumps_on_front(pc, coarse, 0.0, bumps);
        Field vf = bumps_on_front(pf, fine, 0.0, bumps);
        auto direction_norm = [&](const Field& v) {
            Field d = laplacian(v);
            for (int i = 0; i < v.size(); ++i) d[i] += eval_reaction(rt, v[i], 0);
            return norm_l2(d);
        };
        // The identity is exact for the semidiscrete dynamics, so the residual
        // is governed by the time step; refine dt together with h so the
        // refinement study exercises the whole scheme.
        KernelOptions kc, kf;
        kc.dt = 0.1 * coarse.spacing;
        kf.dt = 0.1 * fine.spacing;
        const double rc = std::abs(orthogonality_residual(vc, pc, rt, kc));
        const double rf = std::abs(orthogonality_residual(vf, pf, rt, kf));
        const double rel = rc / direction_norm(vc);
        worst_rel = std::max(worst_rel, rel);
        pass = pass && rel <= 5e-3;
        ratios.push_back(rc);
        ratios.push_back(rf);
    }
    // Refinement behaviour: the aggregate residual halves when h does (+-30%).
    // Aggregating over states keeps noise-floor residuals from skewing the ratio.
    double sum_c = 0.0, sum_f = 0.0;
    for (size_t j = 0; j + 1 < ratios.size(); j += 2) {
        sum_c += ratios[j];
        sum_f += ratios[j + 1];
    }
    const double mean_ratio = sum_f / sum_c;
    pass = pass && mean_ratio >= 0.35 && mean_ratio <= 0.65;
    report(8, pass,
           fmt("worst relative residual %.2e (<=5e-3); refinement ratio %.2f (0.5 +-30%%)",
               worst_rel, mean_ratio));
}

void check09_functional_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    ReactionTerm rt = ReactionTerm::cubic();
    GridSpec g = build_grid(15.9375, 0.125, Boundary::dirichlet_pm1);  // 256 nodes
    Profile p = solve_profile(rt, g);
    RngStream rng(9, RngPurpose::generic_draws, 0);
    double worst = 0.0;
    for (uint32_t k = 0; k < 5; ++k) {
        Field v = bumps_on_front(p, g, 0.0, random_bumps(rng, k, 2, 0.02, 2.5));
        // The identity residual is dominated by the time quadrature of the
        // flow-route functional and the stepper's O(dt) bias; resolve both.
        PdeResidualOptions o;
        o.psibar.sample_spacing = 0.25;
        o.psibar.flow_dt = 0.005;
        o.psibar.kernel.dt = 0.005;
        PdeResidual r = functional_pde_residual(v, p, rt, o);
        worst = std::max(worst, r.relative);
    }
    const double secs = seconds_since(t0);
    report(9, worst <= 0.05 && secs < 600.0,
           fmt("worst relative identity residual %.1f%% (<=5%%), %.0fs (<600s)", 100.0 * worst,
               secs));
}

void check10_alpha2() {
    ReactionTerm rt = ReactionTerm::cubic();
    Alpha2Options o;  // h = 0.05 defaults
    Alpha2Result a = alpha2_detailed(rt, o);
    Alpha2Options half = o;
    half.spacing = o.spacing / 2.0;
    half.dt = o.dt / 2.0;
    Alpha2Result b = alpha2_detailed(rt, half);
    const double refine_rel = std::abs(a.value - b.value) / std::abs(b.value);
    // Translation independence of the cross-check route.  The automatic
    // short-time head window (64 h^2) is over-wide at h = 0.1 and biases the
    // route high; a fixed resolved head removes that bias (the route value is
    // grid-converged: it changes by <3e-4 under h -> h/2 at this head).
    Alpha2CrossOptions xo;
    xo.kernel.head_time = 0.16;
    const double c0 = alpha2_cross_check(rt, 0.0, xo);
    const double c1 = alpha2_cross_check(rt, 0.5, xo);
    const double c2 = alpha2_cross_check(rt, -1.3, xo);
    const double theta_spread =
        std::max(std::abs(c1 - c0), std::abs(c2 - c0)) / std::abs(c0);
    const double routes_rel = std::abs(c0 - b.value) / std::abs(b.value);
    const bool pass = refine_rel <= 0.02 && theta_spread <= 1e-3 && routes_rel <= 0.05;
    report(10, pass,
           fmt("alpha2 %.5f; refinement drift %.2f%% (<=2%%); theta spread %.1e (<=1e-3); routes "
               "differ %.1f%% (<=5%%)",
               b.value, 100.0 * refine_rel, theta_spread, 100.0 * routes_rel));
}

void check11_linear_variance() {
    SimConfig cfg;
    cfg.noise.epsilon = 0.05;
    cfg.noise.gamma = 0.25;
    cfg.noise.master_seed = 1101;
    cfg.horizon_internal = 1.0;
    cfg.spacing = 0.1;
    cfg.track_interface = false;
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_zero);
    const int mid = g.n_points / 2;
    const int n_paths = 10000;
    double sum2 = 0.0;
    for (int k = 0; k < n_paths; ++k) {
        SimConfig c = cfg;
        c.noise.path_index = static_cast<uint32_t>(k);
        sum2 += [&] {
            SpdePath path = simulate_linear(c);
            return path.final_state[mid] * path.final_state[mid];
        }();
    }
    const double mc = sum2 / n_paths;
    const double oracle = linear_variance_oracle(1.0, 0.0, cfg.noise.epsilon, cfg.noise.gamma);
    const double var_rel = std::abs(mc - oracle) / oracle;

    // Amplitude scaling of the running sup norm across epsilon.
    std::vector<double> lx, ly;
    for (double eps : {0.1, 0.05, 0.025}) {
        SimConfig c = cfg;
        c.noise.epsilon = eps;
        c.horizon_internal = 50.0;
        std::vector<double> sups;
        for (int k = 0; k < 200; ++k) {
            c.noise.path_index = static_cast<uint32_t>(k);
            c.noise.master_seed = 1102;
            sups.push_back(simulate_linear(c).sup_dist);
        }
        lx.push_back(std::log(eps));
        ly.push_back(std::log(percentile(sups, 0.9)));
    }
    const double slope = fit_line(lx, ly).slope;
    const double gp = cfg.noise.gamma_prime();
    const bool pass = var_rel <= 0.05 && std::abs(slope - gp) <= 0.15;
    report(11, pass,
           fmt("pointwise variance off by %.1f%% (<=5%%); sup-norm scaling exponent %.2f "
               "(%.2f +-0.15)",
               100.0 * var_rel, slope, gp));
}

void check12_closeness() {
    ReactionTerm rt = ReactionTerm::cubic();
    SimConfig cfg;
    cfg.noise.gamma = 0.5;
    cfg.noise.epsilon = 0.05;
    cfg.noise.master_seed = 1201;
    cfg.kappa = 0.2;
    cfg.horizon_T = 1.0;
    cfg.spacing = 0.1;
    {
        GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
        Profile p = solve_profile(rt, g);
        int ok = 0;
        const int n_paths = 200;
        const double threshold =
            std::pow(cfg.noise.epsilon, cfg.noise.gamma_prime() - cfg.kappa);
        for (int k = 0; k < n_paths; ++k) {
            SimConfig c = cfg;
            c.noise.path_index = static_cast<uint32_t>(k);
            SpdePath path = simulate_path(c, p, rt);
            if (path.valid && !path.stopped && path.sup_dist <= threshold) ++ok;
        }
        const double fraction = static_cast<double>(ok) / n_paths;

        // Scaling of the median sup-distance with epsilon.
        std::vector<double> lx, ly;
        for (double eps : {0.1, 0.05, 0.025}) {
            SimConfig c = cfg;
            c.noise.epsilon = eps;
            c.noise.master_seed = 1202;
            c.kappa = 0.0;  // do not stop: observe the full excursion
            GridSpec ge = simulation_grid(c.noise, c.spacing, Boundary::dirichlet_pm1);
            Profile pe = solve_profile(rt, ge);
            std::vector<double> sups;
            for (int k = 0; k < 40; ++k) {
                c.noise.path_index = static_cast<uint32_t>(k);
                sups.push_back(simulate_path(c, pe, rt).sup_dist);
            }
            lx.push_back(std::log(eps));
            ly.push_back(std::log(percentile(sups, 0.5)));
        }
        const double slope = fit_line(lx, ly).slope;
        const bool pass = fraction >= 0.95 && slope >= 0.5 && slope <= 1.0;
        report(12, pass,
               fmt("%.0f%% of 200 paths stay within eps^(gamma'-kappa) (>=95%%); sup-dist "
                   "scaling slope %.2f (in [0.5,1.0])",
                   100.0 * fraction, slope));
    }
}

void check13_distribution_match() {
    ReactionTerm rt = ReactionTerm::cubic();
    SimConfig cfg;
    cfg.noise.gamma = 0.25;
    cfg.noise.epsilon = 0.05;
    cfg.noise.master_seed = 1301;
    cfg.xi0 = 0.0;
    cfg.horizon_T = 1.0;
    cfg.cadence_T = 0.01;
    cfg.spacing = 0.1;
    GridSpec g = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
    Profile p = solve_profile(rt, g);

    const int n_spde = 500;
    std::vector<InterfaceSeries> series;
    std::vector<std::vector<double>> spde_at(3);  // values at 0.25, 0.5, 1.0
    const double times[3] = {0.25, 0.5, 1.0};
    for (int k = 0; k < n_spde; ++k) {
        SimConfig c = cfg;
        c.noise.path_index = static_cast<uint32_t>(k);
        SpdePath path = simulate_path(c, p, rt);
        if (!path.valid) continue;
        series.push_back(path.interface);
        for (int j = 0; j < 3; ++j) {
            if (path.stopped && path.stop_time < times[j] - 1e-9) continue;
            for (const auto& [t, xi] : path.interface.samples)
                if (std::abs(t - times[j]) < 1e-9) spde_at[static_cast<size_t>(j)].push_back(xi);
        }
    }

    const double a1 = 1.0298836;
    const double a2 = 2.4381;
    SdeConfig sde;
    sde.alpha1 = a1;
    sde.alpha2 = a2;
    sde.master_seed = 1302;
    auto sde_at = ensemble_at_times(sde, 100000, {0.25, 0.5, 1.0});

    bool ks_ok = true;
    double min_p = 1.0;
    for (int j = 0; j < 3; ++j) {
        KsResult ks = ks_two_sample(spde_at[static_cast<size_t>(j)], sde_at[static_cast<size_t>(j)]);
        min_p = std::min(min_p, ks.p_value);
        ks_ok = ks_ok && ks.p_value >= 0.01;
    }
    auto variance = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size());
    };
    const double var_ratio = variance(spde_at[2]) / variance(sde_at[2]);
    QvDriftResult qv = empirical_qv_drift(series, a1, a2);
    const bool var_ok = var_ratio >= 0.8 && var_ratio <= 1.25;
    const bool qv_ok = qv.diffusion.slope >= 0.85 && qv.diffusion.slope <= 1.15 &&
                       qv.drift.slope >= 0.6 && qv.drift.slope <= 1.4;
    report(13, ks_ok && var_ok && qv_ok,
           fmt("KS min p %.3f (>=0.01); terminal variance ratio %.2f (in [0.8,1.25]); qv slopes "
               "diffusion %.2f (in [0.85,1.15]) drift %.2f (in [0.6,1.4])",
               min_p, var_ratio, qv.diffusion.slope, qv.drift.slope));
}

void check14_partition_identities() {
    const long long bell[] = {1, 1, 2, 5, 15, 52, 203};
    bool counts_ok = true;
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
        counts_ok = counts_ok && static_cast<long long>(enumerate_partitions(n).size()) == bell[n];
        IdentityResiduals r = check_partition_identities(n, 100, 1400 + static_cast<uint64_t>(n));
        worst = std::max(worst, r.max_residual);
    }
    report(14, counts_ok && worst <= 1e-10,
           fmt("counts %s; worst relative identity residual %.2e (<=1e-10)",
               counts_ok ? "exact" : "WRONG", worst));
}

void check15_chain_rule() {
    double worst = 0.0;
    for (int order = 1; order <= 4; ++order)
        worst = std::max(worst, faa_di_bruno_check(3, 2, order, 1500 + static_cast<uint64_t>(order)));
    report(15, worst <= 1e-5, fmt("worst chain-rule residual %.2e (<=1e-5)", worst));
}

void check16_determinism() {
    namespace fs = std::filesystem;
    auto run_once = [&](const std::string& dir) {
        fs::remove_all(dir);
        ExperimentRequest req;
        req.verb = "simulate";
        req.config = Config::parse(
            "[noise]\nepsilon = 0.05\ngamma = 0.25\n"
            "[horizon]\nmacroscopic_T = 0.002\ncadence_T = 0.0005\n"
            "[grid]\nspacing = 0.2\n"
            "[simulate]\npaths = 2\n"
            "[tracking]\nt_smooth = 1.0\n");
        req.out_dir = dir;
        req.seed = 1600;
        req.threads = 1;
        return run_experiment(req);
    };
    RunRecord a = run_once("/tmp/aclab_acc16_a");
    RunRecord b = run_once("/tmp/aclab_acc16_b");
    const bool same = a.files == b.files && !a.files.empty();
    fs::remove_all("/tmp/aclab_acc16_a");
    fs::remove_all("/tmp/aclab_acc16_b");
    report(16, same, fmt("repeated run: %zu artifacts, hashes %s", a.files.size(),
                         same ? "identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
    struct Entry {
        int id;
        void (*fn)();
    };
    const Entry entries[] = {
        {1, check01_profile},         {2, check02_norm_and_alpha1},
        {3, check03_spectrum},        {4, check04_semigroup_rate},
        {5, check05_kernel_collapse}, {6, check06_dzeta_fd},
        {7, check07_psi1},            {8, check08_orthogonality},
        {9, check09_functional_identity}, {10, check10_alpha2},
        {11, check11_linear_variance},    {12, check12_closeness},
        {13, check13_distribution_match}, {14, check14_partition_identities},
        {15, check15_chain_rule},         {16, check16_determinism},
    };
    for (const Entry& e : entries) {
        if (!want(e.id)) continue;
        try {
            e.fn();
        } catch (const std::exception& ex) {
            report(e.id, false, std::string("exception: ") + ex.what());
        }
    }
    return g_failures;
}
