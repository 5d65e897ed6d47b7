#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "correctors.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "kernels.hpp"
#include "linop.hpp"
#include "parallel.hpp"
#include "partitions.hpp"
#include "profile.hpp"
#include "sde.hpp"
#include "spde.hpp"
#include "stats.hpp"

namespace aclab {

namespace {

using nlohmann::json;

void add_output(RunRecord& rec, const std::string& out_dir, const std::string& rel) {
    rec.files.emplace_back(rel, sha256_file(out_dir + "/" + rel));
}

GridSpec grid_from(const Config& c, double L_def, double h_def, Boundary b) {
    return build_grid(c.get_double("grid", "half_length", L_def),
                      c.get_double("grid", "spacing", h_def), b);
}

// Admissible test state: translated front plus an optional Gaussian bump.
Field state_from(const Config& c, const std::string& sec, const Profile& p, const GridSpec& g) {
    const double theta = c.get_double(sec, "theta", 0.0);
    const double amp = c.get_double(sec, "bump_amplitude", 0.0);
    const double center = c.get_double(sec, "bump_center", 0.0);
    const double width = c.get_double(sec, "bump_width", 1.0);
    Field v = translate_profile(p, g, theta);
    if (amp != 0.0) {
        if (!(width > 0.0)) throw ValidationError("state: bump_width must be positive");
        for (int i = 0; i < v.size(); ++i) {
            const double r = (g.x(i) - center) / width;
            v[i] += amp * std::exp(-r * r);
        }
    }
    return v;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": not a number: " + tok);
        }
        if (tok.find_first_not_of(" \t", used) != std::string::npos)
            throw ValidationError(std::string(what) + ": not a number: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

// Builds the path-level simulation config and reports *all* violations at
// once, so a bad config is fixed in one round trip.
SimConfig sim_from(const Config& c, uint64_t seed) {
    SimConfig s;
    s.noise.gamma = c.get_double("noise", "gamma", 0.25);
    s.noise.epsilon = c.get_double("noise", "epsilon", 0.05);
    s.noise.master_seed = seed;
    s.xi0 = c.get_double("simulate", "xi0", 0.0);
    s.horizon_T = c.get_double("horizon", "macroscopic_T", 1.0);
    s.cadence_T = c.get_double("horizon", "cadence_T", 0.01);
    s.kappa = c.get_double("tracking", "kappa", 0.2);
    s.t_smooth = c.get_double("tracking", "t_smooth", 2.0);
    s.spacing = c.get_double("grid", "spacing", 0.1);
    s.dt = c.get_double("simulate", "dt", 0.0);

    std::vector<std::string> bad;
    if (!(s.noise.gamma > -0.25))
        bad.push_back("[noise] gamma must exceed -1/4 (large-noise regime refused)");
    if (!(s.noise.epsilon > 0.0 && s.noise.epsilon < 1.0))
        bad.push_back("[noise] epsilon must lie in (0,1)");
    if (!(s.horizon_T > 0.0)) bad.push_back("[horizon] macroscopic_T must be positive");
    if (!(s.cadence_T > 0.0)) bad.push_back("[horizon] cadence_T must be positive");
    if (!(s.kappa >= 0.0)) bad.push_back("[tracking] kappa must be nonnegative");
    if (!(s.t_smooth >= 0.0)) bad.push_back("[tracking] t_smooth must be nonnegative");
    if (!(s.spacing > 0.0)) bad.push_back("[grid] spacing must be positive");
    if (s.dt < 0.0) bad.push_back("[simulate] dt must be nonnegative (0 = automatic)");
    if (!bad.empty()) {
        std::string msg = "invalid simulation config:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ValidationError(msg);
    }
    return s;
}

std::string path_file_name(uint32_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "path_%04u.csv", index);
    return buf;
}

std::string path_csv(const SpdePath& p) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "t,xi,dist,stopped\n";
    for (size_t j = 0; j < p.interface.samples.size(); ++j) {
        const auto& [t, xi] = p.interface.samples[j];
        const double dist = j < p.dist_series.size() ? p.dist_series[j] : 0.0;
        const int flag = p.stopped && t >= p.stop_time - 1e-12 ? 1 : 0;
        out << t << ',' << xi << ',' << dist << ',' << flag << '\n';
    }
    return out.str();
}

std::string sup_csv(const SpdePath& p) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "t,sup\n";
    for (const auto& [t, s] : p.sup_series) out << t << ',' << s << '\n';
    return out.str();
}

struct PathRow {
    double t = 0.0, xi = 0.0, dist = 0.0;
    int stopped = 0;
};

std::vector<PathRow> read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("compare: cannot open " + file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,xi,dist,stopped", 0) != 0)
        throw ValidationError("compare: " + file + " is not an interface path file");
    std::vector<PathRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        PathRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &r.t, &r.xi, &r.dist, &r.stopped) != 4)
            throw ValidationError("compare: malformed row in " + file + ": " + line);
        rows.push_back(r);
    }
    if (rows.empty()) throw ValidationError("compare: " + file + " has no samples");
    return rows;
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size() - 1);
}

// --- verbs ------------------------------------------------------------------

void run_profile(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 20.0, 0.01, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g, req.config.get_double("profile", "tol", 1e-12));
    profile_to_dir(p, req.out_dir + "/profile");
    for (const char* f : {"m.csv", "m1.csv", "m2.csv", "m3.csv", "profile.json"})
        add_output(rec, req.out_dir, std::string("profile/") + f);
    rec.results = {
        {"residual_sup", p.residual_sup},
        {"l2_norm_mprime", p.l2_norm_mprime},
        {"l2_norm_mprime_sq", p.l2_norm_mprime * p.l2_norm_mprime},
        {"decay_constant", p.decay_constant},
        {"newton_iterations", p.newton_iterations},
    };
    const double gate = req.config.get_double("profile", "residual_gate", 1e-6);
    rec.results["residual_gate"] = gate;
    rec.gates_passed = p.residual_sup <= gate;
}

void run_spectrum(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 30.0, 0.01, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g);
    const LinearizedOperator op = assemble(p, rt);
    const int k = static_cast<int>(req.config.get_int("spectrum", "count", 4));
    if (k < 1 || k > g.n_points) throw ValidationError("spectrum: count out of range");
    const SpectrumResult s = spectrum(op, k);
    for (int j = 0; j < std::min(k, 2); ++j) {
        const std::string rel = "eigenfield_" + std::to_string(j) + ".csv";
        field_to_csv(s.eigenfields[static_cast<size_t>(j)], req.out_dir + "/" + rel);
        add_output(rec, req.out_dir, rel);
    }
    rec.results = {
        {"eigenvalues", s.eigenvalues},
        {"residuals", s.residuals},
    };
    const double tol0 = req.config.get_double("spectrum", "bottom_tol", 1e-6);
    const double gap_min = req.config.get_double("spectrum", "gap_min", 1.0);
    rec.results["bottom_tol"] = tol0;
    rec.results["gap_min"] = gap_min;
    rec.gates_passed = std::abs(s.eigenvalues[0]) <= tol0 &&
                       (k < 2 || s.eigenvalues[1] >= gap_min);
}

void run_coeffs(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 20.0, 0.01, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g);
    const Alpha1Result a1 = alpha1_detailed(p, rt);

    Alpha2Options o;
    o.half_length = req.config.get_double("coeffs", "alpha2_half_length", o.half_length);
    o.spacing = req.config.get_double("coeffs", "alpha2_spacing", o.spacing);
    o.dt = req.config.get_double("coeffs", "alpha2_dt", o.dt);
    o.horizon = req.config.get_double("coeffs", "alpha2_horizon", o.horizon);
    const Alpha2Result a2 = alpha2_detailed(rt, o);

    rec.results = {
        {"alpha1", a1.value},
        {"alpha1_quadrature_route", a1.quadrature_route},
        {"alpha1_discrepancy", a1.discrepancy},
        {"alpha2", a2.value},
        {"alpha2_head_coefficient", a2.head_coefficient},
        {"alpha2_tail_estimate", a2.tail_estimate},
        {"alpha2_horizon", a2.horizon},
    };
    rec.gates_passed = true;
    if (req.config.get_bool("coeffs", "refine", false)) {
        Alpha2Options fine = o;
        fine.spacing = o.spacing / 2.0;
        fine.dt = o.dt / 2.0;
        const Alpha2Result a2f = alpha2_detailed(rt, fine);
        const double rel = std::abs(a2f.value - a2.value) /
                           std::max({std::abs(a2.value), std::abs(a2f.value), 1e-12});
        const double tol = req.config.get_double("coeffs", "refine_tol", 0.02);
        rec.results["alpha2_refined"] = a2f.value;
        rec.results["alpha2_refine_rel_change"] = rel;
        rec.results["refine_tol"] = tol;
        rec.gates_passed = rel <= tol;
    }
}

void run_dzeta(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 16.0, 0.05, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g);
    const Field v = state_from(req.config, "dzeta", p, g);
    KernelOptions ko;
    ko.dt = req.config.get_double("dzeta", "dt", ko.dt);
    ko.t_extract = req.config.get_double("dzeta", "t_extract", ko.t_extract);
    KernelEngine engine(v, p, rt, ko);
    const Field dz = engine.dzeta();
    field_to_csv(dz, req.out_dir + "/dzeta.csv");
    add_output(rec, req.out_dir, "dzeta.csv");
    Field ones(dz.grid, 1.0);
    rec.results = {
        {"zeta_base", engine.zeta_base()},
        {"base_stationary", engine.base_stationary()},
        {"integral", inner(dz, ones)},
        {"sup", norm_sup(dz)},
        {"tail_drift", engine.lambda1_tail_drift()},
    };
    rec.gates_passed = true;
}

void run_kernel(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 16.0, 0.05, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g);
    const Field v = state_from(req.config, "kernel", p, g);
    KernelOptions ko;
    ko.dt = req.config.get_double("kernel", "dt", ko.dt);
    KernelEngine engine(v, p, rt, ko);
    const int order = static_cast<int>(req.config.get_int("kernel", "order", 1));
    const double y = req.config.get_double("kernel", "y", 0.0);
    const double t = req.config.get_double("kernel", "t", 1.0);
    KernelSlice slice;
    if (order == 1) {
        slice = engine.first_kernel(y, t);
    } else if (order == 2) {
        slice = engine.second_kernel(y, req.config.get_double("kernel", "y2", y), t);
    } else {
        throw ValidationError("kernel: order must be 1 or 2");
    }
    field_to_csv(slice.slice, req.out_dir + "/kernel.csv");
    add_output(rec, req.out_dir, "kernel.csv");
    Field ones(slice.slice.grid, 1.0);
    rec.results = {
        {"order", slice.order},
        {"y1", slice.y1},
        {"y2", slice.y2},
        {"time", slice.time},
        {"mass", inner(slice.slice, ones)},
        {"sup", norm_sup(slice.slice)},
        {"projection_on_mprime", inner(slice.slice, engine.phi()) / engine.phi_norm2()},
    };
    rec.gates_passed = true;
}

void run_flow_verb(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const GridSpec g = grid_from(req.config, 16.0, 0.05, Boundary::dirichlet_pm1);
    const Profile p = solve_profile(rt, g);
    const Field v = state_from(req.config, "flow", p, g);
    const double t_total = req.config.get_double("flow", "t_total", 10.0);
    const double every = req.config.get_double("flow", "checkpoint_every", 0.5);
    const FlowResult res = run_flow(v, t_total, every, p, rt);
    std::ostringstream csv;
    csv << std::setprecision(17) << "t,center,dist\n";
    for (const auto& cp : res.checkpoints)
        csv << cp.t << ',' << linear_center(cp.state, p) << ',' << dist_to_manifold(cp.state, p)
            << '\n';
    atomic_write(req.out_dir + "/flow.csv", csv.str());
    add_output(rec, req.out_dir, "flow.csv");
    rec.results = {
        {"limit_center", res.limit_center},
        {"fitted_rate", res.fitted_rate},
        {"converged", res.converged},
    };
    rec.gates_passed = res.converged;
}

void run_simulate(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    SimConfig base = sim_from(req.config, req.seed);
    const int n_paths = static_cast<int>(req.config.get_int("simulate", "paths", 8));
    if (n_paths < 1) throw ValidationError("simulate: paths must be at least 1");
    const bool linear = req.config.get_bool("simulate", "linear", false);
    const bool with_decompose = req.config.get_bool("simulate", "decompose", false);
    base.with_checkpoints = with_decompose;

    const int threads = rec.threads;
    std::vector<SpdePath> paths(static_cast<size_t>(n_paths));
    std::vector<SpdePath> lin_paths(linear ? static_cast<size_t>(n_paths) : 0);

    if (linear && !with_decompose) {
        // Linear-only run: no front, no profile needed.
        parallel_for(n_paths, threads, [&](int i) {
            SimConfig c = base;
            c.noise.path_index = static_cast<uint32_t>(i);
            lin_paths[static_cast<size_t>(i)] = simulate_linear(c);
        });
    } else {
        const GridSpec g = simulation_grid(base.noise, base.spacing, Boundary::dirichlet_pm1);
        const Profile p = solve_profile(rt, g);
        parallel_for(n_paths, threads, [&](int i) {
            SimConfig c = base;
            c.noise.path_index = static_cast<uint32_t>(i);
            paths[static_cast<size_t>(i)] = simulate_path(c, p, rt);
            if (linear) lin_paths[static_cast<size_t>(i)] = simulate_linear(c);
        });
        if (with_decompose && linear) {
            json dec = json::array();
            for (int i = 0; i < n_paths; ++i) {
                const DecomposeReport r = decompose_path(paths[static_cast<size_t>(i)],
                                                         lin_paths[static_cast<size_t>(i)], rt, p);
                double max_dist_w = 0.0, max_sup_x = 0.0;
                for (double d : r.dist_w) max_dist_w = std::max(max_dist_w, d);
                for (double s : r.sup_x) max_sup_x = std::max(max_sup_x, s);
                dec.push_back({{"path", i},
                               {"max_dist_w", max_dist_w},
                               {"max_sup_x", max_sup_x},
                               {"mvt_bound_ok", r.bound_ok}});
            }
            rec.results["decomposition"] = dec;
        }
    }

    int stopped = 0, invalid = 0;
    std::vector<double> sup_dists;
    for (const auto& p : paths) {
        if (p.stopped) ++stopped;
        if (!p.valid) ++invalid;
        sup_dists.push_back(p.sup_dist);
        const std::string rel = path_file_name(p.path_index);
        atomic_write(req.out_dir + "/" + rel, path_csv(p));
        add_output(rec, req.out_dir, rel);
    }
    for (const auto& p : lin_paths) {
        const std::string rel = "linear_" + path_file_name(p.path_index);
        atomic_write(req.out_dir + "/" + rel, sup_csv(p));
        add_output(rec, req.out_dir, rel);
    }

    rec.results["paths"] = n_paths;
    rec.results["epsilon"] = base.noise.epsilon;
    rec.results["gamma"] = base.noise.gamma;
    rec.results["internal_time_scale"] = internal_time_scale(base.noise);
    if (!paths.empty()) {
        rec.results["stopped"] = stopped;
        rec.results["invalid"] = invalid;
        rec.results["sup_dist_median"] = percentile(sup_dists, 0.5);
        rec.results["sup_dist_max"] = percentile(sup_dists, 1.0);
        rec.results["stop_threshold"] =
            std::pow(base.noise.epsilon, base.noise.gamma_prime() - base.kappa);
    }
    if (!lin_paths.empty()) {
        std::vector<double> sups;
        for (const auto& p : lin_paths) sups.push_back(p.sup_dist);
        rec.results["linear_sup_median"] = percentile(sups, 0.5);
    }
    rec.gates_passed = invalid == 0;
}

void run_compare(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const std::string spde_dir = req.config.get_string("compare", "spde_dir", "");
    if (spde_dir.empty()) throw ValidationError("compare: [compare] spde_dir is required");
    std::vector<std::vector<PathRow>> spde;
    {
        std::vector<std::string> files;
        for (const auto& e : std::filesystem::directory_iterator(spde_dir)) {
            const std::string name = e.path().filename().string();
            if (name.rfind("path_", 0) == 0 && name.size() > 4 &&
                name.substr(name.size() - 4) == ".csv")
                files.push_back(e.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) spde.push_back(read_path_csv(f));
    }
    if (spde.empty()) throw ValidationError("compare: no path_*.csv files in " + spde_dir);

    const std::vector<double> times =
        parse_list(req.config.get_string("compare", "times", "0.25,0.5,1.0"), "compare times");
    double a1, a2;
    if (req.config.has("compare", "alpha1")) {
        a1 = req.config.get_double("compare", "alpha1", 0.0);
    } else {
        const Profile p = solve_profile(rt, build_grid(20.0, 0.01, Boundary::dirichlet_pm1));
        a1 = alpha1(p, rt);
    }
    if (req.config.has("compare", "alpha2")) {
        a2 = req.config.get_double("compare", "alpha2", 0.0);
    } else {
        a2 = alpha2(rt);
    }

    SdeConfig sc;
    sc.alpha1 = a1;
    sc.alpha2 = a2;
    sc.xi0 = req.config.get_double("compare", "xi0", spde.front().front().xi);
    sc.dt = req.config.get_double("compare", "sde_dt", 1e-3);
    sc.horizon = *std::max_element(times.begin(), times.end());
    sc.master_seed = req.seed;
    const int sde_paths = static_cast<int>(req.config.get_int("compare", "sde_paths", 100000));
    const auto sde = ensemble_at_times(sc, sde_paths, times, rec.threads);

    const double p_gate = req.config.get_double("compare", "ks_p_min", 0.01);
    const double var_lo = req.config.get_double("compare", "var_ratio_min", 0.8);
    const double var_hi = req.config.get_double("compare", "var_ratio_max", 1.25);
    bool gates = true;
    json per_time = json::array();
    for (size_t j = 0; j < times.size(); ++j) {
        std::vector<double> obs;
        int excluded = 0;
        for (const auto& rows : spde) {
            // Closest sample at or before the requested time; skip paths
            // already stopped there (the frozen value is not the front law).
            const PathRow* best = nullptr;
            for (const auto& r : rows)
                if (r.t <= times[j] + 1e-9) best = &r;
            if (!best || best->stopped) {
                ++excluded;
                continue;
            }
            obs.push_back(best->xi);
        }
        if (obs.size() < 2)
            throw ValidationError("compare: too few unstopped interface samples at t=" +
                                  std::to_string(times[j]));
        const KsResult ks = ks_two_sample(obs, sde[j]);
        const double var_ratio = sample_variance(obs) / sample_variance(sde[j]);
        const bool ok = ks.p_value >= p_gate && var_ratio >= var_lo && var_ratio <= var_hi;
        gates = gates && ok;
        per_time.push_back({{"t", times[j]},
                            {"n_spde", obs.size()},
                            {"n_excluded", excluded},
                            {"ks_statistic", ks.statistic},
                            {"ks_p_value", ks.p_value},
                            {"variance_ratio", var_ratio},
                            {"pass", ok}});
    }

    // Increment-level regression of the interface series against the local
    // diffusion/drift predictors of the limit equation.
    std::vector<InterfaceSeries> series;
    for (const auto& rows : spde) {
        InterfaceSeries s;
        for (const auto& r : rows) {
            s.samples.emplace_back(r.t, r.xi);
            if (r.stopped) break;
        }
        series.push_back(std::move(s));
    }
    const int min_samples = static_cast<int>(req.config.get_int("compare", "min_samples", 50));
    const int lag = static_cast<int>(req.config.get_int("compare", "lag", 1));
    const QvDriftResult qv = empirical_qv_drift(series, a1, a2, 16, min_samples, lag);
    const double diff_lo = req.config.get_double("compare", "diffusion_slope_min", 0.85);
    const double diff_hi = req.config.get_double("compare", "diffusion_slope_max", 1.15);
    const double drift_lo = req.config.get_double("compare", "drift_slope_min", 0.6);
    const double drift_hi = req.config.get_double("compare", "drift_slope_max", 1.4);
    const bool diff_ok = qv.diffusion.slope >= diff_lo && qv.diffusion.slope <= diff_hi;
    const bool drift_ok = a2 == 0.0 || (qv.drift.slope >= drift_lo && qv.drift.slope <= drift_hi);
    gates = gates && diff_ok && drift_ok;

    rec.results = {
        {"alpha1", a1},
        {"alpha2", a2},
        {"spde_paths", spde.size()},
        {"sde_paths", sde_paths},
        {"per_time", per_time},
        {"diffusion_slope", qv.diffusion.slope},
        {"diffusion_slope_se", qv.diffusion.slope_se},
        {"drift_slope", qv.drift.slope},
        {"drift_slope_se", qv.drift.slope_se},
        {"diffusion_pass", diff_ok},
        {"drift_pass", drift_ok},
    };
    rec.gates_passed = gates;
}

void run_identities(const ExperimentRequest& req, RunRecord& rec) {
    const int n_max = static_cast<int>(req.config.get_int("identities", "n_max", 6));
    const int trials = static_cast<int>(req.config.get_int("identities", "trials", 100));
    const int order = static_cast<int>(req.config.get_int("identities", "chain_order", 4));
    if (n_max < 1 || n_max > 10) throw ValidationError("identities: n_max out of range [1,10]");

    static const long long bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
    bool counts_ok = true;
    json per_n = json::array();
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto parts = enumerate_partitions(n);
        const bool count_ok = static_cast<long long>(parts.size()) == bell[n];
        counts_ok = counts_ok && count_ok;
        const IdentityResiduals r = check_partition_identities(n, trials, req.seed);
        worst = std::max(worst, r.max_residual);
        per_n.push_back({{"n", n},
                         {"partition_count", parts.size()},
                         {"count_ok", count_ok},
                         {"grouped_with_weights", r.grouped_with_weights},
                         {"grouped_plain", r.grouped_plain},
                         {"full_double_sum", r.full_double_sum}});
    }
    double chain_worst = 0.0;
    for (int k = 1; k <= order; ++k)
        chain_worst = std::max(chain_worst, faa_di_bruno_check(3, 2, k, req.seed + k));

    {
        std::ostringstream csv;
        csv << "n,partition_count,grouped_with_weights,grouped_plain,full_double_sum\n"
            << std::setprecision(17);
        for (const auto& row : per_n)
            csv << row["n"].get<int>() << ',' << row["partition_count"].get<size_t>() << ','
                << row["grouped_with_weights"].get<double>() << ','
                << row["grouped_plain"].get<double>() << ','
                << row["full_double_sum"].get<double>() << '\n';
        atomic_write(req.out_dir + "/identities.csv", csv.str());
        add_output(rec, req.out_dir, "identities.csv");
    }

    const double id_gate = req.config.get_double("identities", "residual_gate", 1e-10);
    const double chain_gate = req.config.get_double("identities", "chain_gate", 1e-5);
    rec.results = {
        {"per_n", per_n},
        {"max_identity_residual", worst},
        {"max_chain_residual", chain_worst},
        {"residual_gate", id_gate},
        {"chain_gate", chain_gate},
        {"bell_counts_ok", counts_ok},
    };
    rec.gates_passed = counts_ok && worst <= id_gate && chain_worst <= chain_gate;
}

void run_closeness(const ExperimentRequest& req, const ReactionTerm& rt, RunRecord& rec) {
    const std::vector<double> eps_list = parse_list(
        req.config.get_string("closeness", "epsilons", "0.1,0.05,0.025"), "closeness epsilons");
    const int n_paths = static_cast<int>(req.config.get_int("closeness", "paths", 48));
    if (n_paths < 2) throw ValidationError("closeness-scan: need at least 2 paths");
    SimConfig base = sim_from(req.config, req.seed);
    base.noise.gamma = req.config.get_double("closeness", "gamma", base.noise.gamma);

    json per_eps = json::array();
    std::vector<double> log_eps, log_med;
    double min_within = 1.0;
    for (double eps : eps_list) {
        SimConfig c0 = base;
        c0.noise.epsilon = eps;
        c0.noise.validate();
        const GridSpec g = simulation_grid(c0.noise, c0.spacing, Boundary::dirichlet_pm1);
        const Profile p = solve_profile(rt, g);
        std::vector<SpdePath> paths(static_cast<size_t>(n_paths));
        parallel_for(n_paths, rec.threads, [&](int i) {
            SimConfig c = c0;
            c.noise.path_index = static_cast<uint32_t>(i);
            paths[static_cast<size_t>(i)] = simulate_path(c, p, rt);
        });
        std::vector<double> sup_dists;
        int within = 0, invalid = 0;
        const double threshold = std::pow(eps, c0.noise.gamma_prime() - c0.kappa);
        for (const auto& path : paths) {
            sup_dists.push_back(path.sup_dist);
            if (!path.stopped && path.valid) ++within;
            if (!path.valid) ++invalid;
        }
        const double med = percentile(sup_dists, 0.5);
        const double frac = static_cast<double>(within) / n_paths;
        min_within = std::min(min_within, frac);
        log_eps.push_back(std::log(eps));
        log_med.push_back(std::log(std::max(med, 1e-300)));
        per_eps.push_back({{"epsilon", eps},
                           {"median_sup_dist", med},
                           {"p90_sup_dist", percentile(sup_dists, 0.9)},
                           {"threshold", threshold},
                           {"fraction_within", frac},
                           {"invalid", invalid}});
    }
    const LineFit fit = fit_line(log_eps, log_med);
    const double slope_lo = req.config.get_double("closeness", "slope_min", 0.5);
    const double slope_hi = req.config.get_double("closeness", "slope_max", 1.0);
    const double within_min = req.config.get_double("closeness", "fraction_min", 0.95);
    rec.results = {
        {"per_epsilon", per_eps},
        {"paths_per_epsilon", n_paths},
        {"gamma", base.noise.gamma},
        {"median_slope", fit.slope},
        {"median_slope_se", fit.slope_se},
        {"min_fraction_within", min_within},
    };
    rec.gates_passed = eps_list.size() < 2 ||
                       (fit.slope >= slope_lo && fit.slope <= slope_hi &&
                        min_within >= within_min);
}

}  // namespace

RunRecord run_experiment(const ExperimentRequest& req) {
    RunRecord rec;
    rec.experiment = req.verb;
    rec.config_snapshot = req.config.raw_text();
    rec.master_seed = req.seed;
    rec.threads = req.threads > 0 ? req.threads : default_threads();
    if (req.out_dir.empty()) throw ValidationError("output directory is required");
    ensure_directory(req.out_dir);

    const ReactionTerm rt = ReactionTerm::cubic();
    const auto t0 = std::chrono::steady_clock::now();
    if (req.verb == "profile") {
        run_profile(req, rt, rec);
    } else if (req.verb == "spectrum") {
        run_spectrum(req, rt, rec);
    } else if (req.verb == "coeffs") {
        run_coeffs(req, rt, rec);
    } else if (req.verb == "dzeta") {
        run_dzeta(req, rt, rec);
    } else if (req.verb == "kernel") {
        run_kernel(req, rt, rec);
    } else if (req.verb == "flow") {
        run_flow_verb(req, rt, rec);
    } else if (req.verb == "simulate") {
        run_simulate(req, rt, rec);
    } else if (req.verb == "compare") {
        run_compare(req, rt, rec);
    } else if (req.verb == "verify-identities") {
        run_identities(req, rec);
    } else if (req.verb == "closeness-scan") {
        run_closeness(req, rt, rec);
    } else {
        throw ValidationError("unknown verb: " + req.verb);
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_run_record(rec, req.out_dir);
    write_report(rec, req.out_dir);
    return rec;
}

}  // namespace aclab
