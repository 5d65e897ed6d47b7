#include "correctors.hpp"

#include <algorithm>
#include <cmath>

#include "cutoff.hpp"
#include "flow.hpp"

namespace aclab {

namespace {

constexpr double kInvSqrt8Pi = 0.19947114020071635;  // (8*pi)^(-1/2)

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

// Fitted exponential tail of |samples| over the trailing quarter: returns the
// estimated integral of the continuation past the horizon (0 when the tail is
// already at rounding level).
double exponential_tail(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t n = t.size();
    if (n < 4) return std::abs(y.empty() ? 0.0 : y.back());
    const double last = std::abs(y.back());
    if (last < 1e-13) return last;
    const size_t start = n - std::max<size_t>(3, n / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t cnt = 0;
    for (size_t i = start; i < n; ++i) {
        const double a = std::abs(y[i]);
        if (a < 1e-15) continue;
        sx += t[i];
        sy += std::log(a);
        sxx += t[i] * t[i];
        sxy += t[i] * std::log(a);
        ++cnt;
    }
    if (cnt < 2) return last;
    const double denom = cnt * sxx - sx * sx;
    if (denom == 0.0) return last;
    const double rate = -(cnt * sxy - sx * sy) / denom;
    if (rate <= 0.05) return last * 20.0;  // no decay detected: pessimistic bound
    return last / rate;
}

}  // namespace

Alpha1Result alpha1_detailed(const Profile& p, const ReactionTerm& rt) {
    Alpha1Result res;
    res.value = 1.0 / p.l2_norm_mprime;
    GridSpec g = p.grid;
    g.boundary = Boundary::dirichlet_pm1;
    Field base = discrete_steady_state(rt, g, 1e-13, &p);
    KernelEngine engine(base, p, rt);
    Field dz = engine.dzeta();
    double acc = 0.0;
    for (int i = 0; i < dz.size(); ++i) acc += dz[i] * dz[i];
    res.quadrature_route = std::sqrt(acc * p.grid.spacing);
    res.discrepancy = std::abs(res.value - res.quadrature_route);
    if (res.discrepancy > 1e-3)
        throw NumericError("alpha1: quadrature route disagrees with 1/|m'| by " +
                           std::to_string(res.discrepancy));
    return res;
}

double alpha1(const Profile& p, const ReactionTerm& rt) { return alpha1_detailed(p, rt).value; }

Alpha2Result alpha2_detailed(const ReactionTerm& rt, Alpha2Options o) {
    const GridSpec grid = build_grid(o.half_length, o.spacing, Boundary::dirichlet_pm1);
    const Profile profile = solve_profile(rt, grid);
    const Field base = discrete_steady_state(rt, grid, 1e-13, &profile);
    KernelOptions ko;
    ko.dt = o.dt;
    ko.t_extract = o.horizon;
    ko.matrix_limit = grid.n_points;  // streamed evolution, no dense output
    KernelEngine engine(base, profile, rt, ko);

    const int n = grid.n_points;
    const double h = grid.spacing, dt = o.dt;
    std::vector<double> W(static_cast<size_t>(n));
    for (int z = 0; z < n; ++z)
        W[static_cast<size_t>(z)] = o.zero_second_derivative_hook
                                        ? 0.0
                                        : eval_reaction(rt, base[z], 2) * profile.m1[z];

    const int K = static_cast<int>(std::round(o.horizon / dt));
    std::vector<double> ts, J;
    ts.reserve(static_cast<size_t>(K));
    J.reserve(static_cast<size_t>(K));
    engine.evolve_matrix(o.horizon, [&](int k, double t, const std::vector<double>& mid) {
        if (k < KernelEngine::kStartupSteps) return;
        double total = 0.0;
        for (int y = 0; y < n; ++y) {
            const double* c = mid.data() + static_cast<size_t>(y) * static_cast<size_t>(n);
            double acc = 0.0;
            for (int z = 0; z < n; ++z) acc += W[static_cast<size_t>(z)] * c[z] * c[z];
            total += grid.x(y) * acc;
        }
        ts.push_back(t);
        J.push_back(total * h * h);
    });

    double A = 0.0;
    for (int z = 0; z < n; ++z) A += grid.x(z) * W[static_cast<size_t>(z)];
    A *= kInvSqrt8Pi * h;

    const double t_a = engine.head_time_resolved();
    size_t first = 0;
    while (first < ts.size() && ts[first] < t_a) ++first;
    if (first + 4 >= ts.size())
        throw NumericError("alpha2: horizon too short for the short-time head window");
    const double t0 = ts[first];
    double M[3][3] = {{0}}, rhs[3] = {0};
    for (size_t i = first; i < ts.size() && ts[i] <= t0 + 1.5; ++i) {
        const double st = std::sqrt(ts[i]);
        const double basis[3] = {st, ts[i] * st, ts[i] * ts[i] * st};
        const double resid = J[i] - A / st;
        for (int a = 0; a < 3; ++a) {
            rhs[a] += basis[a] * resid;
            for (int b = 0; b < 3; ++b) M[a][b] += basis[a] * basis[b];
        }
    }
    solve3(M, rhs);
    const double st0 = std::sqrt(t0);
    double total = 2.0 * A * st0 + (2.0 / 3.0) * rhs[0] * t0 * st0 +
                   (2.0 / 5.0) * rhs[1] * t0 * t0 * st0 +
                   (2.0 / 7.0) * rhs[2] * t0 * t0 * t0 * st0;
    for (size_t i = first; i < ts.size(); ++i) {
        const double w = (i == first || i + 1 == ts.size()) ? 0.5 * dt : dt;
        total += w * J[i];
    }
    total += 0.5 * dt * J.back();  // rectangle up to the horizon

    Alpha2Result res;
    res.head_coefficient = A;
    res.horizon = o.horizon;
    res.tail_estimate = exponential_tail(ts, J);
    if (res.tail_estimate > o.tail_gate)
        throw NumericError("alpha2: truncated tail estimate " +
                           std::to_string(res.tail_estimate) +
                           " above gate; increase the horizon");
    res.value = -total / profile.l2_norm_mprime;
    return res;
}

double alpha2(const ReactionTerm& rt, Alpha2Options o) { return alpha2_detailed(rt, o).value; }

double alpha2_cross_check(const ReactionTerm& rt, double theta, Alpha2CrossOptions o) {
    const GridSpec grid = build_grid(o.half_length, o.spacing, Boundary::dirichlet_pm1);
    const Profile profile = solve_profile(rt, grid);
    const Field m3 = discrete_steady_state(rt, grid, 1e-13, &profile);
    Field base(grid);
    const double cells = theta / grid.spacing;
    const long shift = std::lround(cells);
    if (std::abs(cells - shift) < 1e-9) {
        // Exact lattice translation of the discrete steady front (stationary
        // base, translation-equivariant computation).
        for (int i = 0; i < grid.n_points; ++i) {
            const long j = i - shift;
            base[i] = (j < 0) ? -1.0 : (j >= grid.n_points ? 1.0 : m3[static_cast<int>(j)]);
        }
    } else {
        base = translate_profile(profile, grid, theta);
    }
    KernelEngine engine(base, profile, rt, o.kernel);
    Field l2d = engine.lambda2_diag();
    double acc = 0.0;
    for (int i = 0; i < grid.n_points; ++i) acc += (grid.x(i) - theta) * l2d[i];
    return -acc * grid.spacing;  // D2zeta = -lambda2
}

double psi1(const Field& v, const Profile& p, const ReactionTerm& rt, KernelOptions ko) {
    KernelEngine engine(v, p, rt, ko);
    Field l2d = engine.lambda2_diag();
    double acc = 0.0;
    for (int i = 0; i < l2d.size(); ++i) acc += l2d[i];
    return -acc * v.grid.spacing;
}

Psibar1Result psibar1_detailed(const Field& v, double T_max, const Profile& p,
                               const ReactionTerm& rt, Psibar1Options o) {
    if (!(T_max > 0.0)) throw ValidationError("psibar1: T_max must be positive");
    Psibar1Result res;
    DeterministicStepper s(v.grid, o.flow_dt, rt);
    const int steps_per_sample =
        std::max(1, static_cast<int>(std::round(o.sample_spacing / o.flow_dt)));
    const double spacing = steps_per_sample * o.flow_dt;
    const int n_samples = static_cast<int>(std::round(T_max / spacing));
    Field u = v;
    for (int j = 0; j <= n_samples; ++j) {
        res.sample_times.push_back(j * spacing);
        res.sample_values.push_back(psi1(u, p, rt, o.kernel));
        if (j < n_samples)
            for (int k = 0; k < steps_per_sample; ++k) s.step(u.values);
    }
    // Composite Simpson (trapezoid on a trailing odd panel): the integrand is
    // a smooth exponentially decaying signal, and the fourth-order rule keeps
    // the time-quadrature error far below the cancellation identities this
    // integral feeds.
    double total = 0.0;
    int j = 0;
    for (; j + 2 <= n_samples; j += 2)
        total += spacing / 3.0 *
                 (res.sample_values[static_cast<size_t>(j)] +
                  4.0 * res.sample_values[static_cast<size_t>(j) + 1] +
                  res.sample_values[static_cast<size_t>(j) + 2]);
    if (j + 1 <= n_samples)
        total += 0.5 * spacing *
                 (res.sample_values[static_cast<size_t>(j)] +
                  res.sample_values[static_cast<size_t>(j) + 1]);
    res.value = total;
    res.tail_estimate = exponential_tail(res.sample_times, res.sample_values);
    if (res.tail_estimate > o.tail_tol)
        throw NumericError("psibar1: truncated tail estimate " +
                           std::to_string(res.tail_estimate) + " above gate; increase T_max");
    return res;
}

double psibar1(const Field& v, double T_max, const Profile& p, const ReactionTerm& rt,
               Psibar1Options o) {
    return psibar1_detailed(v, T_max, p, rt, o).value;
}

double corrector1(const Field& v, const CorrectorSpec& spec, const Profile& p,
                  const ReactionTerm& rt, double T_max, Psibar1Options o) {
    if (spec.order != 1)
        throw ValidationError("corrector1: only the first-order corrector is evaluable");
    if (!(spec.gamma > -0.25))
        throw ValidationError("corrector1: gamma must exceed -1/4");
    const double z = zeta(v, p, rt);
    const double amp = cutoff_a(std::sqrt(spec.epsilon) * z);
    if (amp == 0.0) return 0.0;
    const double psib = psibar1(v, T_max, p, rt, o);
    return 0.5 * std::pow(spec.epsilon, 2.0 * spec.gamma_prime()) * amp * amp * psib;
}

double orthogonality_residual(const Field& v, const Profile& p, const ReactionTerm& rt,
                              KernelOptions ko) {
    check_field(v, "orthogonality_residual");
    Field w = laplacian(v);
    for (int i = 0; i < v.size(); ++i) w[i] += eval_reaction(rt, v[i], 0);
    KernelEngine engine(v, p, rt, ko);
    Field dz = engine.dzeta();
    return inner(dz, w);
}

PdeResidual functional_pde_residual(const Field& v, const Profile& p, const ReactionTerm& rt,
                                    PdeResidualOptions o) {
    check_field(v, "functional_pde_residual");
    const double zv = zeta(v, p, rt);
    Field w = laplacian(v);
    for (int i = 0; i < v.size(); ++i) w[i] += eval_reaction(rt, v[i], 0);
    Field wm = w;
    double mass_out = 0.0, mass_all = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        mass_all += w[i] * w[i];
        if (std::abs(v.grid.x(i) - zv) > o.window) {
            mass_out += w[i] * w[i];
            wm[i] = 0.0;
        }
    }
    if (mass_all > 1e-20 && std::sqrt(mass_out / mass_all) > o.window_tol)
        throw NumericError("functional_pde_residual: direction mass outside the window; widen it");
    const double sup_w = norm_sup(wm);
    const double delta = o.fd_sup / std::max(sup_w, 1e-14);
    Field vp = v, vn = v;
    for (int i = 0; i < v.size(); ++i) {
        vp[i] += delta * wm[i];
        vn[i] -= delta * wm[i];
    }
    PdeResidual res;
    const double psip = psibar1(vp, o.T_max, p, rt, o.psibar);
    const double psin = psibar1(vn, o.T_max, p, rt, o.psibar);
    res.term_flow = (psip - psin) / (2.0 * delta);
    res.term_trace = psi1(v, p, rt, o.psibar.kernel);
    res.residual = res.term_flow + res.term_trace;
    res.relative =
        std::abs(res.residual) / std::max({std::abs(res.term_flow), std::abs(res.term_trace), 1e-300});
    return res;
}

}  // namespace aclab
