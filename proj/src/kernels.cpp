#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace aclab {

namespace {

constexpr double kInvSqrt8Pi = 0.19947114020071635;  // (8*pi)^(-1/2)

// Solve a 3x3 symmetric linear system in place (tiny least-squares helper).
void solve3(double a[3][3], double b[3]) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        const double d = a[c][c];
        if (d == 0.0) continue;
        for (int r = c + 1; r < 3; ++r) {
            const double fac = a[r][c] / d;
            for (int cc = c; cc < 3; ++cc) a[r][cc] -= fac * a[c][cc];
            b[r] -= fac * b[c];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int cc = r + 1; cc < 3; ++cc) acc -= a[r][cc] * b[cc];
        b[r] = (a[r][r] != 0.0) ? acc / a[r][r] : 0.0;
    }
}

// integral over (0, t) of (8 pi s)^(-1/2) exp(-d^2/(8s)) ds  (heat-kernel
// square at separation d); closed form via the substitution u = sqrt(s).
double head_integral(double d, double t) {
    d = std::abs(d);
    const double st = std::sqrt(t);
    const double b = d / (2.0 * std::sqrt(2.0));
    return 2.0 * kInvSqrt8Pi *
           (st * std::exp(-b * b / t) - b * std::sqrt(M_PI) * std::erfc(b / st));
}

}  // namespace

KernelEngine::KernelEngine(const Field& base, const Profile& profile, const ReactionTerm& rt,
                           KernelOptions opts)
    : base_(base), profile_(profile), rt_(rt), opts_(opts) {
    check_field(base_, "KernelEngine");
    if (!(opts_.dt > 0.0)) throw ValidationError("KernelEngine: dt must be positive");
    gz_ = base_.grid;
    gz_.boundary = Boundary::dirichlet_zero;
    // Stationarity probe: one deterministic step.
    DeterministicStepper s(base_.grid, opts_.dt, rt_);
    std::vector<double> u = base_.values;
    s.step(u);
    double move = 0.0;
    for (int i = 0; i < base_.size(); ++i) move = std::max(move, std::abs(u[i] - base_[i]));
    stationary_ = move < 1e-12;
}

KernelEngine::StepOps KernelEngine::build_ops(const std::vector<double>& pot) const {
    const int n = gz_.n_points;
    const double h = gz_.spacing, dt = opts_.dt;
    const double r = dt / (2.0 * h * h);
    std::vector<double> lo(static_cast<size_t>(n) - 1, -r), up(static_cast<size_t>(n) - 1, -r),
        di(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        di[static_cast<size_t>(i)] = 1.0 + 2.0 * r - 0.5 * dt * pot[static_cast<size_t>(i)];
    StepOps ops;
    ops.cn_solve = Tridiag(lo, di, up);
    std::vector<double> lo2(static_cast<size_t>(n) - 1, r), up2(static_cast<size_t>(n) - 1, r),
        di2(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        di2[static_cast<size_t>(i)] = 1.0 - 2.0 * r + 0.5 * dt * pot[static_cast<size_t>(i)];
    ops.cn_apply = Tridiag(lo2, di2, up2);
    // Half-step backward Euler (delta-smoothing startup).
    const double rs = 0.5 * dt / (h * h);
    std::vector<double> lo3(static_cast<size_t>(n) - 1, -rs), up3(static_cast<size_t>(n) - 1, -rs),
        di3(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        di3[static_cast<size_t>(i)] = 1.0 + 2.0 * rs - 0.5 * dt * pot[static_cast<size_t>(i)];
    ops.be_solve = Tridiag(lo3, di3, up3);
    return ops;
}

void KernelEngine::ensure_steps(int n_steps) {
    if (stationary_) {
        if (!ops0_ready_) {
            std::vector<double> pot(static_cast<size_t>(gz_.n_points));
            for (int i = 0; i < gz_.n_points; ++i) pot[static_cast<size_t>(i)] = eval_reaction(rt_, base_[i], 1);
            pot_mid_.push_back(pot);
            bg_mid_.push_back(base_.values);
            ops0_ = build_ops(pot);
            ops0_ready_ = true;
        }
        return;
    }
    if (static_cast<int>(pot_mid_.size()) >= n_steps) return;
    if (bg_.empty()) bg_.push_back(base_);
    DeterministicStepper s(base_.grid, opts_.dt, rt_);
    while (static_cast<int>(pot_mid_.size()) < n_steps) {
        Field next = bg_.back();
        s.step(next.values);
        const int n = gz_.n_points;
        std::vector<double> mid(static_cast<size_t>(n)), pot(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            mid[static_cast<size_t>(i)] = 0.5 * (bg_.back()[i] + next[i]);
            pot[static_cast<size_t>(i)] = eval_reaction(rt_, mid[static_cast<size_t>(i)], 1);
        }
        bg_mid_.push_back(std::move(mid));
        pot_mid_.push_back(std::move(pot));
        bg_.push_back(std::move(next));
    }
}

const KernelEngine::StepOps& KernelEngine::ops(int step) {
    ensure_steps(stationary_ ? 0 : step + 1);
    if (stationary_) return ops0_;
    if (scratch_step_ != step) {
        ops_scratch_ = build_ops(pot_mid_[static_cast<size_t>(step)]);
        scratch_step_ = step;
    }
    return ops_scratch_;
}

const std::vector<double>& KernelEngine::background_mid(int step) {
    ensure_steps(stationary_ ? 0 : step + 1);
    return bg_mid_[stationary_ ? 0 : static_cast<size_t>(step)];
}

void KernelEngine::apply_step(int step, std::vector<double>& u, std::vector<double>& scratch) {
    const StepOps& o = ops(step);
    if (step < kStartupSteps) {
        o.be_solve.solve(u.data());
        o.be_solve.solve(u.data());
    } else {
        o.cn_apply.apply(u.data(), scratch.data());
        o.cn_solve.solve(scratch.data());
        u.swap(scratch);
    }
}

int KernelEngine::steps_for(double t, const char* context) const {
    if (t < 0.0) throw ValidationError(std::string(context) + ": negative time");
    const int k = static_cast<int>(std::round(t / opts_.dt));
    if (std::abs(t - k * opts_.dt) > 1e-9)
        throw ValidationError(std::string(context) + ": time must be a multiple of dt");
    return k;
}

KernelSlice KernelEngine::first_kernel(double y, double t) {
    const int K = steps_for(t, "first_kernel");
    const int iy = static_cast<int>(std::round(gz_.index_of(y)));
    if (iy < 0 || iy >= gz_.n_points || std::abs(gz_.x(iy) - y) > 1e-9)
        throw ValidationError("first_kernel: source point is not a grid node");
    ensure_steps(K);
    KernelSlice out;
    out.order = 1;
    out.y1 = y;
    out.time = t;
    out.slice = Field(gz_);
    out.slice[iy] = 1.0 / gz_.spacing;
    std::vector<double> scratch(static_cast<size_t>(gz_.n_points));
    for (int k = 0; k < K; ++k) apply_step(k, out.slice.values, scratch);
    return out;
}

KernelSlice KernelEngine::second_kernel(double y1, double y2, double t) {
    const int K = steps_for(t, "second_kernel");
    const int n = gz_.n_points;
    const int i1 = static_cast<int>(std::round(gz_.index_of(y1)));
    const int i2 = static_cast<int>(std::round(gz_.index_of(y2)));
    if (i1 < 0 || i1 >= n || std::abs(gz_.x(i1) - y1) > 1e-9 || i2 < 0 || i2 >= n ||
        std::abs(gz_.x(i2) - y2) > 1e-9)
        throw ValidationError("second_kernel: source points must be grid nodes");
    ensure_steps(K);
    KernelSlice out;
    out.order = 2;
    out.y1 = y1;
    out.y2 = y2;
    out.time = t;
    out.slice = Field(gz_);
    std::vector<double> p1(static_cast<size_t>(n), 0.0), p2(static_cast<size_t>(n), 0.0);
    p1[static_cast<size_t>(i1)] = 1.0 / gz_.spacing;
    p2[static_cast<size_t>(i2)] = 1.0 / gz_.spacing;
    std::vector<double> scratch(static_cast<size_t>(n)), old1(static_cast<size_t>(n)),
        old2(static_cast<size_t>(n)), f2(static_cast<size_t>(n));
    std::vector<double>& u = out.slice.values;
    const double dt = opts_.dt;
    for (int k = 0; k < K; ++k) {
        const StepOps& o = ops(k);
        const std::vector<double>& mid = background_mid(k);
        for (int i = 0; i < n; ++i) f2[static_cast<size_t>(i)] = eval_reaction(rt_, mid[static_cast<size_t>(i)], 2);
        if (k < kStartupSteps) {
            for (int half = 0; half < 2; ++half) {
                o.be_solve.solve(p1.data());
                o.be_solve.solve(p2.data());
                for (int i = 0; i < n; ++i)
                    u[static_cast<size_t>(i)] +=
                        0.5 * dt * f2[static_cast<size_t>(i)] * p1[static_cast<size_t>(i)] * p2[static_cast<size_t>(i)];
                o.be_solve.solve(u.data());
            }
        } else {
            old1 = p1;
            old2 = p2;
            o.cn_apply.apply(old1.data(), p1.data());
            o.cn_solve.solve(p1.data());
            o.cn_apply.apply(old2.data(), p2.data());
            o.cn_solve.solve(p2.data());
            o.cn_apply.apply(u.data(), scratch.data());
            for (int i = 0; i < n; ++i) {
                const double m1 = 0.5 * (old1[static_cast<size_t>(i)] + p1[static_cast<size_t>(i)]);
                const double m2 = 0.5 * (old2[static_cast<size_t>(i)] + p2[static_cast<size_t>(i)]);
                scratch[static_cast<size_t>(i)] += dt * f2[static_cast<size_t>(i)] * m1 * m2;
            }
            o.cn_solve.solve(scratch.data());
            u.swap(scratch);
        }
    }
    return out;
}

double KernelEngine::zeta_base() {
    if (!zeta_ready_) {
        if (stationary_) {
            zeta_ = linear_center(base_, profile_);
        } else {
            zeta_ = zeta(base_, profile_, rt_);
        }
        zeta_ready_ = true;
    }
    return zeta_;
}

void KernelEngine::ensure_phi() {
    if (phi_ready_) return;
    phi_ = translate_profile_d1(profile_, gz_, zeta_base());
    phi_norm2_ = inner(phi_, phi_);
    phi_ready_ = true;
}

const Field& KernelEngine::phi() {
    ensure_phi();
    return phi_;
}

double KernelEngine::phi_norm2() {
    ensure_phi();
    return phi_norm2_;
}

Field KernelEngine::lambda1_at_horizon(int n_steps) {
    ensure_steps(n_steps);
    ensure_phi();
    std::vector<double> w = phi_.values, scratch(w.size());
    for (int k = n_steps - 1; k >= 0; --k) apply_step(k, w, scratch);
    Field out(gz_);
    for (int i = 0; i < gz_.n_points; ++i) out[i] = w[static_cast<size_t>(i)] / phi_norm2_;
    return out;
}

Field KernelEngine::lambda1() {
    for (int attempt = 0; attempt <= opts_.max_extraction_doublings; ++attempt) {
        const int K = steps_for(opts_.t_extract, "lambda1");
        Field full = lambda1_at_horizon(K);
        Field part = lambda1_at_horizon((3 * K) / 4);
        double drift = 0.0;
        for (int i = 0; i < full.size(); ++i)
            drift = std::max(drift, std::abs(full[i] - part[i]));
        tail_drift_ = drift;
        if (drift <= opts_.residual_gate) return full;
        opts_.t_extract *= 2.0;
    }
    throw NumericError("lambda1: extraction time too small (tail drift " +
                       std::to_string(tail_drift_) + " above gate after doubling)");
}

double KernelEngine::lambda2_pair(double y1, double y2) {
    ensure_phi();
    KernelSlice s = second_kernel(y1, y2, opts_.t_extract);
    return inner(s.slice, phi_) / phi_norm2_;
}

double KernelEngine::head_time_resolved() const {
    if (opts_.head_time > 0.0) return opts_.head_time;
    const double h = gz_.spacing;
    double t = std::max({4.0 * opts_.dt, 0.08, 64.0 * h * h});
    t = std::min(t, 0.25 * opts_.t_extract);
    return t;
}

void KernelEngine::evolve_matrix(
    double t_final, const std::function<void(int, double, const std::vector<double>&)>& visit) {
    const int K = steps_for(t_final, "evolve_matrix");
    ensure_steps(K);
    const int n = gz_.n_points;
    const size_t nn = static_cast<size_t>(n);
    std::vector<double> P(nn * nn, 0.0), mid(nn * nn), col(nn), scratch(nn);
    const double inv_h = 1.0 / gz_.spacing;
    for (int y = 0; y < n; ++y) P[static_cast<size_t>(y) * nn + static_cast<size_t>(y)] = inv_h;
    for (int k = 0; k < K; ++k) {
        std::memcpy(mid.data(), P.data(), nn * nn * sizeof(double));
        for (int y = 0; y < n; ++y) {
            double* c = P.data() + static_cast<size_t>(y) * nn;
            std::memcpy(col.data(), c, nn * sizeof(double));
            apply_step(k, col, scratch);
            std::memcpy(c, col.data(), nn * sizeof(double));
        }
        for (size_t i = 0; i < nn * nn; ++i) mid[i] = 0.5 * (mid[i] + P[i]);
        visit(k, (k + 0.5) * opts_.dt, mid);
    }
}

Field KernelEngine::lambda2_diag() {
    const int n = gz_.n_points;
    if (n > opts_.matrix_limit)
        throw ValidationError("lambda2_diag: grid too large for dense second-order extraction");
    ensure_phi();
    const double h = gz_.spacing, dt = opts_.dt;
    for (int attempt = 0; attempt <= opts_.max_extraction_doublings; ++attempt) {
        const int K = steps_for(opts_.t_extract, "lambda2_diag");
        ensure_steps(K);
        // Backward sweep: wtil[k] pairs the step-k source injection with the
        // remaining propagation onto m'; w itself is the full adjoint state.
        std::vector<std::vector<double>> wtil(static_cast<size_t>(K));
        {
            std::vector<double> w = phi_.values, tmp(w.size());
            for (int k = K - 1; k >= 0; --k) {
                const StepOps& o = ops(k);
                if (k >= kStartupSteps) {
                    tmp = w;
                    o.cn_solve.solve(tmp.data());
                    wtil[static_cast<size_t>(k)] = tmp;
                    o.cn_apply.apply(tmp.data(), w.data());
                } else {
                    o.be_solve.solve(w.data());
                    o.be_solve.solve(w.data());
                }
            }
        }
        // Forward sweep of the full kernel matrix, accumulating per-source
        // integrand samples g_y(t) = <f''(bg) p(y,.)^2, wtil>.
        std::vector<std::vector<double>> g(static_cast<size_t>(K));
        std::vector<double> f2(static_cast<size_t>(n));
        evolve_matrix(opts_.t_extract, [&](int k, double, const std::vector<double>& mid) {
            if (k < kStartupSteps) return;
            const std::vector<double>& bg = background_mid(k);
            for (int i = 0; i < n; ++i)
                f2[static_cast<size_t>(i)] = eval_reaction(rt_, bg[static_cast<size_t>(i)], 2);
            std::vector<double> row(static_cast<size_t>(n), 0.0);
            const std::vector<double>& wt = wtil[static_cast<size_t>(k)];
            for (int y = 0; y < n; ++y) {
                const double* c = mid.data() + static_cast<size_t>(y) * static_cast<size_t>(n);
                double acc = 0.0;
                for (int z = 0; z < n; ++z)
                    acc += f2[static_cast<size_t>(z)] * c[z] * c[z] * wt[static_cast<size_t>(z)];
                row[static_cast<size_t>(y)] = acc * h;
            }
            g[static_cast<size_t>(k)] = std::move(row);
        });
        // Tail gate: the integrand must have decayed by the horizon.
        double tail = 0.0;
        for (int y = 0; y < n; ++y) tail = std::max(tail, std::abs(g[static_cast<size_t>(K) - 1][static_cast<size_t>(y)]));
        if (tail > opts_.residual_gate && attempt < opts_.max_extraction_doublings) {
            opts_.t_extract *= 2.0;
            continue;
        }
        if (tail > opts_.residual_gate)
            throw NumericError("lambda2_diag: integrand tail " + std::to_string(tail) +
                               " above gate at the doubled horizon");
        // Time integral per source: analytic 1/sqrt(t) head below t_a (the
        // grid cannot resolve the coincident-source singularity), fitted
        // smooth remainder, trapezoid beyond.
        const double t_a = head_time_resolved();
        int k_first = kStartupSteps;
        while (k_first < K && (k_first + 0.5) * dt < t_a) ++k_first;
        if (k_first >= K - 4)
            throw NumericError("lambda2_diag: horizon too short for the short-time head window");
        const double t0 = (k_first + 0.5) * dt;
        int k_fit_end = k_first;
        while (k_fit_end < K && (k_fit_end + 0.5) * dt <= t0 + opts_.fit_window) ++k_fit_end;
        const std::vector<double>& bg0 = background_mid(k_first);
        Field out(gz_);
        for (int y = 0; y < n; ++y) {
            const double a_y = kInvSqrt8Pi * eval_reaction(rt_, bg0[static_cast<size_t>(y)], 2) *
                               wtil[static_cast<size_t>(k_first)][static_cast<size_t>(y)];
            // Least squares of g - a/sqrt(t) on {sqrt(t), t^1.5, t^2.5}.
            double M[3][3] = {{0}}, rhs[3] = {0};
            for (int k = k_first; k < k_fit_end; ++k) {
                const double t = (k + 0.5) * dt;
                const double st = std::sqrt(t);
                const double basis[3] = {st, t * st, t * t * st};
                const double resid = g[static_cast<size_t>(k)][static_cast<size_t>(y)] - a_y / st;
                for (int a = 0; a < 3; ++a) {
                    rhs[a] += basis[a] * resid;
                    for (int b = 0; b < 3; ++b) M[a][b] += basis[a] * basis[b];
                }
            }
            solve3(M, rhs);
            const double st0 = std::sqrt(t0);
            double total = 2.0 * a_y * st0 + (2.0 / 3.0) * rhs[0] * t0 * st0 +
                           (2.0 / 5.0) * rhs[1] * t0 * t0 * st0 +
                           (2.0 / 7.0) * rhs[2] * t0 * t0 * t0 * st0;
            for (int k = k_first; k < K; ++k) {
                const double w = (k == k_first || k == K - 1) ? 0.5 * dt : dt;
                total += w * g[static_cast<size_t>(k)][static_cast<size_t>(y)];
            }
            total += 0.5 * dt * g[static_cast<size_t>(K) - 1][static_cast<size_t>(y)];
            out[y] = total / phi_norm2_;
        }
        return out;
    }
    throw NumericError("lambda2_diag: unreachable");
}

std::vector<double> KernelEngine::lambda2_matrix() {
    const int n = gz_.n_points;
    if (n > opts_.matrix_limit)
        throw ValidationError("lambda2_matrix: grid too large for dense pair-function storage");
    ensure_phi();
    const double h = gz_.spacing, dt = opts_.dt;
    const int K = steps_for(opts_.t_extract, "lambda2_matrix");
    ensure_steps(K);
    std::vector<std::vector<double>> wtil(static_cast<size_t>(K));
    {
        std::vector<double> w = phi_.values, tmp(w.size());
        for (int k = K - 1; k >= 0; --k) {
            const StepOps& o = ops(k);
            if (k >= kStartupSteps) {
                tmp = w;
                o.cn_solve.solve(tmp.data());
                wtil[static_cast<size_t>(k)] = tmp;
                o.cn_apply.apply(tmp.data(), w.data());
            } else {
                o.be_solve.solve(w.data());
                o.be_solve.solve(w.data());
            }
        }
    }
    const double t_a = head_time_resolved();
    int k_first = kStartupSteps;
    while (k_first < K && (k_first + 0.5) * dt < t_a) ++k_first;
    if (k_first >= K - 4)
        throw NumericError("lambda2_matrix: horizon too short for the short-time head window");
    // Strided time samples with trapezoid weights; the head is added in
    // closed form below.
    const int stride = std::max(1, (K - k_first) / 120);
    std::vector<int> ks;
    for (int k = k_first; k < K; k += stride) ks.push_back(k);
    std::vector<double> tw(ks.size());
    auto tau = [&](size_t j) { return (ks[j] + 0.5) * dt; };
    for (size_t j = 0; j < ks.size(); ++j) {
        const double left = (j == 0) ? 0.0 : 0.5 * (tau(j) - tau(j - 1));
        const double right =
            (j + 1 == ks.size()) ? (opts_.t_extract - tau(j)) : 0.5 * (tau(j + 1) - tau(j));
        tw[j] = left + right;
    }
    const size_t nn = static_cast<size_t>(n);
    std::vector<double> M(nn * nn, 0.0), f2(nn), weighted(nn * nn);
    size_t next = 0;
    evolve_matrix(opts_.t_extract, [&](int k, double, const std::vector<double>& mid) {
        if (next >= ks.size() || k != ks[next]) return;
        const double wq = tw[next] * h;
        ++next;
        const std::vector<double>& bg = background_mid(k);
        const std::vector<double>& wt = wtil[static_cast<size_t>(k)];
        for (int z = 0; z < n; ++z)
            f2[static_cast<size_t>(z)] =
                eval_reaction(rt_, bg[static_cast<size_t>(z)], 2) * wt[static_cast<size_t>(z)];
        for (int y = 0; y < n; ++y) {
            const double* c = mid.data() + static_cast<size_t>(y) * nn;
            double* wcol = weighted.data() + static_cast<size_t>(y) * nn;
            for (int z = 0; z < n; ++z) wcol[z] = f2[static_cast<size_t>(z)] * c[z];
        }
        for (int y1 = 0; y1 < n; ++y1) {
            const double* w1 = weighted.data() + static_cast<size_t>(y1) * nn;
            for (int y2 = y1; y2 < n; ++y2) {
                const double* c2 = mid.data() + static_cast<size_t>(y2) * nn;
                double acc = 0.0;
                for (int z = 0; z < n; ++z) acc += w1[z] * c2[z];
                const double add = wq * acc;
                M[static_cast<size_t>(y1) * nn + static_cast<size_t>(y2)] += add;
                if (y2 != y1) M[static_cast<size_t>(y2) * nn + static_cast<size_t>(y1)] += add;
            }
        }
    });
    // Closed-form short-time head (heat-kernel square against the local
    // source weight at the pair midpoint).
    const double t0 = tau(0);
    const std::vector<double>& bg0 = background_mid(k_first);
    const std::vector<double>& wt0 = wtil[static_cast<size_t>(k_first)];
    for (int y1 = 0; y1 < n; ++y1) {
        for (int y2 = y1; y2 < n; ++y2) {
            const int im = (y1 + y2) / 2;
            const double gbar = eval_reaction(rt_, bg0[static_cast<size_t>(im)], 2) *
                                wt0[static_cast<size_t>(im)];
            const double d = (y2 - y1) * h;
            const double add = gbar * head_integral(d, t0);
            M[static_cast<size_t>(y1) * nn + static_cast<size_t>(y2)] += add;
            if (y2 != y1) M[static_cast<size_t>(y2) * nn + static_cast<size_t>(y1)] += add;
        }
    }
    for (double& v : M) v /= phi_norm2_;
    return M;
}

Field KernelEngine::dzeta() {
    Field l1 = lambda1();
    for (int i = 0; i < l1.size(); ++i) l1[i] = -l1[i];
    return l1;
}

Field KernelEngine::d2zeta_diag() {
    Field l2 = lambda2_diag();
    for (int i = 0; i < l2.size(); ++i) l2[i] = -l2[i];
    return l2;
}

}  // namespace aclab
