#include "sde.hpp"

#include <algorithm>
#include <cmath>

#include "cutoff.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace aclab {

double step_sde(double xi, double dt, const SdeConfig& cfg, const RngStream& stream,
                uint32_t step) {
    if (!(dt > 0.0) || dt > cfg.dt + 1e-15)
        throw ValidationError("step_sde: dt must be positive and no larger than the configured dt");
    const double a = cutoff_a(xi);
    if (a == 0.0) return xi;  // outside the cutoff support the path is frozen
    const double drift = cfg.alpha2 * a * cutoff_a_prime(xi);
    const double diff = cfg.alpha1 * a;
    return xi + drift * dt + diff * std::sqrt(dt) * stream.normal(step, 0);
}

std::vector<double> sde_path(const SdeConfig& cfg, uint32_t path_index,
                             const std::vector<double>& sample_times) {
    if (!(cfg.dt > 0.0) || cfg.horizon < cfg.dt)
        throw ValidationError("sde_path: need dt > 0 and horizon >= dt");
    RngStream stream(cfg.master_seed, RngPurpose::sde_noise, path_index);
    const int total = static_cast<int>(std::round(cfg.horizon / cfg.dt));
    std::vector<int> marks;
    marks.reserve(sample_times.size());
    for (double t : sample_times) {
        const int k = static_cast<int>(std::round(t / cfg.dt));
        if (k < 0 || k > total) throw ValidationError("sde_path: sample time outside the horizon");
        marks.push_back(k);
    }
    std::vector<double> out(sample_times.size());
    double xi = cfg.xi0;
    size_t next = 0;
    std::vector<size_t> order(marks.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return marks[a] < marks[b]; });
    for (int step = 0; step <= total; ++step) {
        while (next < order.size() && marks[order[next]] == step) {
            out[order[next]] = xi;
            ++next;
        }
        if (step < total) xi = step_sde(xi, cfg.dt, cfg, stream, static_cast<uint32_t>(step));
    }
    return out;
}

std::vector<double> ensemble_terminal(const SdeConfig& cfg, int n_paths, int threads) {
    std::vector<std::vector<double>> all =
        ensemble_at_times(cfg, n_paths, {cfg.horizon}, threads);
    return all.front();
}

std::vector<std::vector<double>> ensemble_at_times(const SdeConfig& cfg, int n_paths,
                                                   const std::vector<double>& times,
                                                   int threads) {
    if (n_paths < 1) throw ValidationError("ensemble_at_times: need at least one path");
    std::vector<std::vector<double>> out(times.size(),
                                         std::vector<double>(static_cast<size_t>(n_paths)));
    parallel_for(n_paths, threads, [&](int path) {
        const std::vector<double> vals = sde_path(cfg, static_cast<uint32_t>(path), times);
        for (size_t j = 0; j < times.size(); ++j) out[j][static_cast<size_t>(path)] = vals[j];
    });
    return out;
}

}  // namespace aclab
