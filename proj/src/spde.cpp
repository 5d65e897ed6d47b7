#include "spde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cutoff.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "quadrature.hpp"

namespace aclab {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void fnv_accumulate(uint64_t& hash, double value) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &value, sizeof(double));
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= kFnvPrime;
    }
}

}  // namespace

double NoiseSpec::amplitude() const { return std::pow(epsilon, gamma + 0.25); }

void NoiseSpec::validate() const {
    std::string problems;
    if (!(gamma > -0.25))
        problems += "gamma must exceed -1/4 (large-noise regime refused); ";
    if (!(epsilon > 0.0 && epsilon < 1.0)) problems += "epsilon must lie in (0,1); ";
    if (!problems.empty()) {
        problems.resize(problems.size() - 2);  // drop trailing separator
        throw ValidationError("NoiseSpec: " + problems);
    }
}

Field sample_noise(const GridSpec& grid, double dt, const RngStream& stream, uint32_t step) {
    if (!(dt > 0.0)) throw ValidationError("sample_noise: dt must be positive");
    Field out(grid);
    const double sd = std::sqrt(dt / grid.spacing);
    for (int i = 0; i < grid.n_points; ++i)
        out[i] = sd * stream.normal(step, static_cast<uint32_t>(i));
    return out;
}

Field step_spde(const Field& v, double dt, const NoiseSpec& spec, const ReactionTerm& rt,
                const RngStream& stream, uint32_t step, bool* valid, double sup_bound,
                double amplitude_override) {
    check_field(v, "step_spde");
    spec.validate();
    const double sup_f1 = sup_fprime(rt, sup_bound);
    if (!(dt * sup_f1 < 1.0))
        throw ValidationError("step_spde: dt * sup f' must stay below 1");
    const double amp = amplitude_override >= 0.0 ? amplitude_override : spec.amplitude();
    const double sqrt_eps = std::sqrt(spec.epsilon);
    const double sd = std::sqrt(dt / v.grid.spacing);
    std::vector<double> forcing(static_cast<size_t>(v.size()));
    for (int i = 0; i < v.size(); ++i)
        forcing[static_cast<size_t>(i)] = amp * cutoff_a(sqrt_eps * v.grid.x(i)) * sd *
                                          stream.normal(step, static_cast<uint32_t>(i));
    DeterministicStepper s(v.grid, dt, rt);
    Field out = v;
    const double sup = s.step_forced(out.values, forcing.data(), true);
    if (valid) *valid = sup <= sup_bound;
    return out;
}

GridSpec simulation_grid(const NoiseSpec& spec, double spacing, Boundary boundary) {
    spec.validate();
    const double raw = 1.0 / std::sqrt(spec.epsilon) + 10.0;
    const double L = std::ceil(raw / spacing - 1e-12) * spacing;
    return build_grid(L, spacing, boundary);
}

double internal_time_scale(const NoiseSpec& spec) {
    return std::pow(spec.epsilon, -2.0 * spec.gamma - 1.5);
}

double resolve_dt(const SimConfig& cfg, const ReactionTerm& rt) {
    if (cfg.dt > 0.0) return cfg.dt;
    return std::min(0.01, 0.5 / sup_fprime(rt, cfg.sup_bound));
}

SpdePath simulate_path(const SimConfig& cfg, const Profile& p, const ReactionTerm& rt) {
    cfg.noise.validate();
    const GridSpec grid = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_pm1);
    if (!p.grid.same_geometry(grid))
        throw ValidationError("simulate_path: profile grid must match the simulation grid");
    const double dt = resolve_dt(cfg, rt);
    const double scale = internal_time_scale(cfg.noise);
    const double T_int = cfg.horizon_internal > 0.0 ? cfg.horizon_internal
                                                    : cfg.horizon_T * scale;
    const int total_steps = std::max(1, static_cast<int>(std::ceil(T_int / dt - 1e-9)));
    const int steps_per_sample =
        std::max(1, static_cast<int>(std::round(cfg.cadence_T * scale / dt)));

    const double sqrt_eps = std::sqrt(cfg.noise.epsilon);
    const double amp = cfg.noise.amplitude();
    const double threshold = std::pow(cfg.noise.epsilon, cfg.noise.gamma_prime() - cfg.kappa);
    const double sd = std::sqrt(dt / grid.spacing);
    const int n = grid.n_points;

    std::vector<double> aeps(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) aeps[static_cast<size_t>(i)] = cutoff_a(sqrt_eps * grid.x(i));

    RngStream stream(cfg.noise.master_seed, RngPurpose::spde_noise, cfg.noise.path_index);
    DeterministicStepper stepper(grid, dt, rt);
    DeterministicStepper smoother(grid, 0.01, rt);
    const int smooth_steps = static_cast<int>(std::round(cfg.t_smooth / 0.01));

    SpdePath path;
    path.master_seed = cfg.noise.master_seed;
    path.path_index = cfg.noise.path_index;
    path.noise_checksum = kFnvOffset;

    Field v = translate_profile(p, grid, cfg.xi0 / sqrt_eps);
    path.interface.samples.emplace_back(0.0, cfg.xi0);
    path.dist_series.push_back(dist_to_manifold(v, p));
    if (cfg.with_checkpoints) path.checkpoints.emplace_back(0.0, v);

    double prev_eta = cfg.xi0 / sqrt_eps;
    double frozen_xi = cfg.xi0;
    std::vector<double> forcing(static_cast<size_t>(n));
    bool halted = false;

    for (int step = 1; step <= total_steps && !halted; ++step) {
        for (int i = 0; i < n; ++i) {
            const double dw = sd * stream.normal(static_cast<uint32_t>(step),
                                                 static_cast<uint32_t>(i));
            fnv_accumulate(path.noise_checksum, dw);
            forcing[static_cast<size_t>(i)] = amp * aeps[static_cast<size_t>(i)] * dw;
        }
        const double sup = stepper.step_forced(v.values, forcing.data(), true);
        if (sup > cfg.sup_bound) {
            path.valid = false;
            halted = true;
            break;
        }
        if (step % steps_per_sample == 0 || step == total_steps) {
            const double t_macro = step * dt / scale;
            const double dist = dist_to_manifold(v, p);
            path.sup_dist = std::max(path.sup_dist, dist);
            Field smooth = v;
            for (int k = 0; k < smooth_steps; ++k) smoother.step(smooth.values);
            const double eta = linear_center(smooth, p, prev_eta);
            prev_eta = eta;
            frozen_xi = sqrt_eps * eta;
            path.interface.samples.emplace_back(t_macro, frozen_xi);
            path.dist_series.push_back(dist);
            if (cfg.with_checkpoints) path.checkpoints.emplace_back(t_macro, v);
            if (dist > threshold) {
                path.stopped = true;
                path.stop_time = t_macro;
                halted = true;
            }
        }
    }
    // Fill the remaining cadence with the frozen interface value so all paths
    // have a uniform sample schedule.
    if (halted) {
        const double T_macro = T_int / scale;
        double t = path.interface.samples.back().first;
        const double cadence = steps_per_sample * dt / scale;
        while (t + cadence <= T_macro + 1e-12) {
            t += cadence;
            path.interface.samples.emplace_back(t, frozen_xi);
            path.dist_series.push_back(path.dist_series.back());
        }
    }
    path.final_state = v;
    return path;
}

SpdePath simulate_linear(const SimConfig& cfg) {
    cfg.noise.validate();
    const GridSpec grid = simulation_grid(cfg.noise, cfg.spacing, Boundary::dirichlet_zero);
    const ReactionTerm rt;  // unused by the linear step
    const double dt = resolve_dt(cfg, rt);
    const double scale = internal_time_scale(cfg.noise);
    const double T_int = cfg.horizon_internal > 0.0 ? cfg.horizon_internal
                                                    : cfg.horizon_T * scale;
    const int total_steps = std::max(1, static_cast<int>(std::ceil(T_int / dt - 1e-9)));
    const int steps_per_sample =
        std::max(1, static_cast<int>(std::round(cfg.cadence_T * scale / dt)));

    const double sqrt_eps = std::sqrt(cfg.noise.epsilon);
    const double amp = cfg.noise.amplitude();  // eps^{gamma'}
    const double sd = std::sqrt(dt / grid.spacing);
    const int n = grid.n_points;
    std::vector<double> aeps(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) aeps[static_cast<size_t>(i)] = cutoff_a(sqrt_eps * grid.x(i));

    RngStream stream(cfg.noise.master_seed, RngPurpose::spde_noise, cfg.noise.path_index);
    DeterministicStepper stepper(grid, dt, rt);

    SpdePath path;
    path.master_seed = cfg.noise.master_seed;
    path.path_index = cfg.noise.path_index;
    path.noise_checksum = kFnvOffset;

    Field x(grid, 0.0);
    if (cfg.with_checkpoints) path.checkpoints.emplace_back(0.0, x);
    path.sup_series.emplace_back(0.0, 0.0);

    std::vector<double> forcing(static_cast<size_t>(n));
    double running_sup = 0.0;
    for (int step = 1; step <= total_steps; ++step) {
        for (int i = 0; i < n; ++i) {
            const double dw = sd * stream.normal(static_cast<uint32_t>(step),
                                                 static_cast<uint32_t>(i));
            fnv_accumulate(path.noise_checksum, dw);
            forcing[static_cast<size_t>(i)] = amp * aeps[static_cast<size_t>(i)] * dw;
        }
        const double sup = stepper.step_forced(x.values, forcing.data(), false);
        running_sup = std::max(running_sup, sup);
        if (step % steps_per_sample == 0 || step == total_steps) {
            const double t_macro = step * dt / scale;
            path.sup_series.emplace_back(t_macro, running_sup);
            if (cfg.with_checkpoints) path.checkpoints.emplace_back(t_macro, x);
        }
    }
    path.sup_dist = running_sup;
    path.final_state = x;
    return path;
}

DecomposeReport decompose_path(const SpdePath& full, const SpdePath& linear,
                               const ReactionTerm& rt, const Profile& p) {
    if (full.master_seed != linear.master_seed || full.path_index != linear.path_index)
        throw ValidationError("decompose_path: paths do not share a noise stream");
    if (full.checkpoints.empty() || linear.checkpoints.empty())
        throw ValidationError("decompose_path: both paths need stored checkpoints");
    DecomposeReport rep;
    const size_t count = std::min(full.checkpoints.size(), linear.checkpoints.size());
    for (size_t j = 0; j < count; ++j) {
        const auto& [tv, v] = full.checkpoints[j];
        const auto& [tx, x] = linear.checkpoints[j];
        if (std::abs(tv - tx) > 1e-9)
            throw ValidationError("decompose_path: checkpoint schedules disagree");
        if (!v.grid.same_geometry(x.grid))
            throw ValidationError("decompose_path: checkpoint grids disagree");
        Field w = v;
        double sup_x = 0.0, sup_r = 0.0, range = 0.0;
        for (int i = 0; i < v.size(); ++i) {
            w[i] = v[i] - x[i];
            sup_x = std::max(sup_x, std::abs(x[i]));
            range = std::max({range, std::abs(v[i]), std::abs(w[i])});
            sup_r = std::max(sup_r,
                             std::abs(eval_reaction(rt, v[i], 0) - eval_reaction(rt, w[i], 0)));
        }
        const double bound = sup_fprime(rt, range) * sup_x;
        rep.times.push_back(tv);
        rep.dist_w.push_back(dist_to_manifold(w, p));
        rep.sup_x.push_back(sup_x);
        rep.sup_r.push_back(sup_r);
        rep.mvt_bound.push_back(bound);
        if (sup_r > bound * (1.0 + 1e-12) + 1e-15) rep.bound_ok = false;
    }
    return rep;
}

double linear_variance_oracle(double t, double x, double epsilon, double gamma) {
    if (t <= 0.0) return 0.0;
    const double gamma_prime = gamma + 0.25;
    const double sqrt_eps = std::sqrt(epsilon);
    // E X^2 = eps^{2g'} int_0^t (4 pi tau)^{-1} int exp(-(x-y)^2/(2 tau)) a(se y)^2 dy dtau.
    // Substitute y = x + sqrt(2 tau) u, then tau = sigma^2: the integrand is
    // smooth in sigma.
    auto g = [&](double sigma) {
        auto inner = [&](double u) {
            const double a = cutoff_a(sqrt_eps * (x + std::sqrt(2.0) * sigma * u));
            return std::exp(-u * u) * a * a;
        };
        double acc = 0.0;
        const int panels = 48;
        const double lo = -6.0, hi = 6.0, w = (hi - lo) / panels;
        for (int k = 0; k < panels; ++k) acc += gauss5(inner, lo + k * w, lo + (k + 1) * w);
        return acc / std::sqrt(M_PI);
    };
    const double outer = adaptive_simpson([&](double s) { return g(s); }, 0.0, std::sqrt(t), 1e-10);
    constexpr double kInvSqrt8Pi = 0.19947114020071635;
    return std::pow(epsilon, 2.0 * gamma_prime) * 2.0 * kInvSqrt8Pi * outer;
}

}  // namespace aclab
