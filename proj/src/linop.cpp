#include "linop.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <lapacke.h>

#include "tridiag.hpp"

namespace aclab {

LinearizedOperator assemble(const Profile& p, const ReactionTerm& rt) {
    GridSpec g = p.grid;
    g.boundary = Boundary::dirichlet_zero;
    LinearizedOperator op;
    op.grid = g;
    GridSpec front_grid = p.grid;
    front_grid.boundary = Boundary::dirichlet_pm1;
    op.steady_state = discrete_steady_state(rt, front_grid, 1e-13, &p);
    op.potential = Field(g);
    for (int i = 0; i < g.n_points; ++i)
        op.potential[i] = eval_reaction(rt, op.steady_state[i], 1);
    return op;
}

Field apply_operator(const LinearizedOperator& op, const Field& v) {
    check_field(v, "apply_operator");
    if (!v.grid.same_geometry(op.grid))
        throw ValidationError("apply_operator: field grid does not match the operator grid");
    Field tmp = v;
    tmp.grid.boundary = Boundary::dirichlet_zero;
    Field lap = laplacian(tmp);
    Field out(op.grid);
    for (int i = 0; i < v.size(); ++i) out[i] = -lap[i] - op.potential[i] * v[i];
    return out;
}

SpectrumResult spectrum(const LinearizedOperator& op, int k) {
    const int n = op.grid.n_points;
    if (k < 1 || k > n) throw ValidationError("spectrum: eigenpair count out of range");
    const double h = op.grid.spacing;
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> d(static_cast<size_t>(n)), e(static_cast<size_t>(n) - 1, -inv_h2);
    for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = 2.0 * inv_h2 - op.potential[i];

    std::vector<double> w(static_cast<size_t>(n));
    std::vector<double> z(static_cast<size_t>(n) * static_cast<size_t>(k));
    std::vector<lapack_int> isuppz(2 * static_cast<size_t>(k));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0,
                                           0.0, 1, k, 0.0, &found, w.data(), z.data(), n,
                                           isuppz.data());
    if (info != 0 || found < k)
        throw NumericError("spectrum: tridiagonal eigensolver failed (info = " +
                           std::to_string(info) + ")");

    SpectrumResult res;
    const double inv_sqrt_h = 1.0 / std::sqrt(h);
    for (int j = 0; j < k; ++j) {
        res.eigenvalues.push_back(w[static_cast<size_t>(j)]);
        Field ev(op.grid);
        const double* col = z.data() + static_cast<size_t>(j) * static_cast<size_t>(n);
        // LAPACK returns Euclidean-unit vectors; rescale to unit L2 integral
        // norm and fix the sign so the interior maximum is positive.
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(col[i]) > std::abs(col[imax])) imax = i;
        const double sign = col[imax] < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) ev[i] = sign * col[i] * inv_sqrt_h;
        Field r = apply_operator(op, ev);
        for (int i = 0; i < n; ++i) r[i] -= w[static_cast<size_t>(j)] * ev[i];
        res.residuals.push_back(norm_l2(r));
        res.eigenfields.push_back(std::move(ev));
    }
    return res;
}

Field project_P(const Field& v, const Profile& p) {
    check_field(v, "project_P");
    if (!v.grid.same_geometry(p.grid))
        throw ValidationError("project_P: field grid does not match the profile grid");
    const double coeff = inner(v, p.m1) / (p.l2_norm_mprime * p.l2_norm_mprime);
    Field out(v.grid);
    for (int i = 0; i < v.size(); ++i) out[i] = coeff * p.m1[i];
    return out;
}

Field project_P_perp(const Field& v, const Profile& p) {
    Field par = project_P(v, p);
    Field out = v;
    for (int i = 0; i < v.size(); ++i) out[i] -= par[i];
    return out;
}

Field semigroup_apply(const LinearizedOperator& op, double t, const Field& v) {
    check_field(v, "semigroup_apply");
    if (t < 0.0) throw ValidationError("semigroup_apply: negative time");
    if (t == 0.0) return v;
    if (!v.grid.same_geometry(op.grid))
        throw ValidationError("semigroup_apply: field grid does not match the operator grid");
    const double dt = std::min(0.01, t / 100.0);
    const int steps = std::max(1, static_cast<int>(std::round(t / dt)));
    const double step_dt = t / steps;
    const int n = op.grid.n_points;
    const double r = step_dt / (2.0 * op.grid.spacing * op.grid.spacing);
    // Crank-Nicolson:  (I + dt/2 A) u+ = (I - dt/2 A) u,  A = -Lap - W.
    std::vector<double> lo(static_cast<size_t>(n) - 1, -r), up(static_cast<size_t>(n) - 1, -r),
        di(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        di[static_cast<size_t>(i)] = 1.0 + 2.0 * r - 0.5 * step_dt * op.potential[i];
    Tridiag left(lo, di, up);
    std::vector<double> lo2(static_cast<size_t>(n) - 1, r), up2(static_cast<size_t>(n) - 1, r),
        di2(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        di2[static_cast<size_t>(i)] = 1.0 - 2.0 * r + 0.5 * step_dt * op.potential[i];
    Tridiag right(lo2, di2, up2);

    Field out = v;
    std::vector<double> tmp(static_cast<size_t>(n));
    for (int s = 0; s < steps; ++s) {
        right.apply(out.values.data(), tmp.data());
        left.solve(tmp.data());
        out.values.swap(tmp);
    }
    return out;
}

}  // namespace aclab
