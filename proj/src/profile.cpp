#include "profile.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "quadrature.hpp"
#include "tridiag.hpp"

namespace aclab {

namespace {

// Cubic Lagrange interpolation on a uniform table with edge clamping.
double interp_cubic(const Field& tab, double x, double outside_left, double outside_right) {
    const GridSpec& g = tab.grid;
    if (x <= -g.half_length) return outside_left;
    if (x >= g.half_length) return outside_right;
    const double u = g.index_of(x);
    int i0 = static_cast<int>(std::floor(u));
    // 4-point stencil i0-1 .. i0+2, shifted inward at the edges.
    int base = i0 - 1;
    if (base < 0) base = 0;
    if (base > g.n_points - 4) base = g.n_points - 4;
    const double t = u - base;  // position relative to the stencil start
    // Lagrange weights for nodes at offsets 0,1,2,3.
    const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return w0 * tab[base] + w1 * tab[base + 1] + w2 * tab[base + 2] + w3 * tab[base + 3];
}

void antisymmetrize(std::vector<double>& v) {
    const size_t n = v.size();
    for (size_t i = 0; 2 * i < n; ++i) {
        const double a = 0.5 * (v[i] - v[n - 1 - i]);
        v[i] = a;
        v[n - 1 - i] = -a;
    }
}

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

double Profile::m_at(double x) const { return interp_cubic(m, x, -1.0, 1.0); }
double Profile::m1_at(double x) const { return interp_cubic(m1, x, 0.0, 0.0); }
double Profile::m2_at(double x) const { return interp_cubic(m2, x, 0.0, 0.0); }

namespace {

// Residual of the compact fourth-order stencil:
//   (m_{i+1} - 2 m_i + m_{i-1})/h^2 + (g_{i+1} + 10 g_i + g_{i-1})/12 = 0
// with g = f(m) and ghost values m = -+1 (so g = 0 at the ghosts).
void numerov_residual(const ReactionTerm& rt, const GridSpec& g, const std::vector<double>& m,
                      std::vector<double>& F) {
    const int n = g.n_points;
    const double h2 = g.spacing * g.spacing;
    F.resize(static_cast<size_t>(n));
    auto gval = [&](int i) -> double {
        if (i < 0) return eval_reaction(rt, -1.0, 0);
        if (i >= n) return eval_reaction(rt, 1.0, 0);
        return eval_reaction(rt, m[static_cast<size_t>(i)], 0);
    };
    auto mval = [&](int i) -> double {
        if (i < 0) return -1.0;
        if (i >= n) return 1.0;
        return m[static_cast<size_t>(i)];
    };
    for (int i = 0; i < n; ++i)
        F[static_cast<size_t>(i)] = (mval(i + 1) - 2.0 * m[static_cast<size_t>(i)] + mval(i - 1)) / h2 +
                                    (gval(i + 1) + 10.0 * gval(i) + gval(i - 1)) / 12.0;
}

void threept_residual(const ReactionTerm& rt, const GridSpec& g, const std::vector<double>& m,
                      std::vector<double>& F) {
    const int n = g.n_points;
    const double h2 = g.spacing * g.spacing;
    F.resize(static_cast<size_t>(n));
    auto mval = [&](int i) -> double {
        if (i < 0) return -1.0;
        if (i >= n) return 1.0;
        return m[static_cast<size_t>(i)];
    };
    for (int i = 0; i < n; ++i)
        F[static_cast<size_t>(i)] = (mval(i + 1) - 2.0 * m[static_cast<size_t>(i)] + mval(i - 1)) / h2 +
                                    eval_reaction(rt, m[static_cast<size_t>(i)], 0);
}

// Shared damped-Newton driver; `numerov` picks the stencil.
std::vector<double> newton_profile(const ReactionTerm& rt, const GridSpec& g, double tol,
                                   bool numerov, std::vector<double> m, int& iters_out,
                                   double& residual_out) {
    const int n = g.n_points;
    const double h2 = g.spacing * g.spacing;
    std::vector<double> F, Fnew, dm, trial;
    std::ostringstream history;
    auto residual = [&](const std::vector<double>& mm, std::vector<double>& out) {
        if (numerov)
            numerov_residual(rt, g, mm, out);
        else
            threept_residual(rt, g, mm, out);
    };
    antisymmetrize(m);
    residual(m, F);
    int it = 0;
    for (; it < 120; ++it) {
        std::vector<double> lo(static_cast<size_t>(n) - 1), di(static_cast<size_t>(n)),
            up(static_cast<size_t>(n) - 1);
        for (int i = 0; i < n; ++i) {
            const double fp = eval_reaction(rt, m[static_cast<size_t>(i)], 1);
            di[static_cast<size_t>(i)] = -2.0 / h2 + (numerov ? 10.0 / 12.0 * fp : fp);
        }
        for (int i = 0; i + 1 < n; ++i) {
            const double fp_r = eval_reaction(rt, m[static_cast<size_t>(i) + 1], 1);
            const double fp_l = eval_reaction(rt, m[static_cast<size_t>(i)], 1);
            up[static_cast<size_t>(i)] = 1.0 / h2 + (numerov ? fp_r / 12.0 : 0.0);
            lo[static_cast<size_t>(i)] = 1.0 / h2 + (numerov ? fp_l / 12.0 : 0.0);
        }
        Tridiag J(std::move(lo), std::move(di), std::move(up));
        dm = F;
        for (double& x : dm) x = -x;
        J.solve(dm);
        const double step0 = sup_abs(dm);
        // Backtracking damping on the residual sup-norm.
        double lam = 1.0;
        const double f0 = sup_abs(F);
        for (int bt = 0; bt < 10; ++bt) {
            trial = m;
            for (int i = 0; i < n; ++i) trial[static_cast<size_t>(i)] += lam * dm[static_cast<size_t>(i)];
            antisymmetrize(trial);
            residual(trial, Fnew);
            if (sup_abs(Fnew) <= f0 || lam < 1e-3) break;
            lam *= 0.5;
        }
        m.swap(trial);
        F.swap(Fnew);
        history << "iter " << it << " residual " << sup_abs(F) << "\n";
        if (lam * step0 < tol) break;
    }
    residual_out = sup_abs(F);
    iters_out = it + 1;
    if (residual_out > std::max(1e3 * tol, 1e-9))
        throw NumericError("profile solver did not converge; residual history:\n" + history.str());
    return m;
}

std::vector<double> initial_guess(const ReactionTerm& rt, const GridSpec& g) {
    std::vector<double> m(static_cast<size_t>(g.n_points));
    const bool cubic = rt.kind == ReactionTerm::Kind::cubic;
    for (int i = 0; i < g.n_points; ++i)
        m[static_cast<size_t>(i)] = cubic ? std::tanh(g.x(i) / std::sqrt(2.0)) : std::tanh(g.x(i) / 2.0);
    return m;
}

}  // namespace

Profile solve_profile(const ReactionTerm& rt, const GridSpec& grid, double tol) {
    if (grid.boundary != Boundary::dirichlet_pm1)
        throw ValidationError("solve_profile: grid boundary must be dirichlet_pm1");
    Profile p;
    p.grid = grid;
    int iters = 0;
    double res = 0.0;
    std::vector<double> m = newton_profile(rt, grid, tol, /*numerov=*/true, initial_guess(rt, grid),
                                           iters, res);
    p.newton_iterations = iters;
    p.residual_sup = res;
    p.m = Field(grid);
    p.m.values = m;

    // First integral: 1/2 (m')^2 + V(m) = V(1) with V' = f, so
    // m' = sqrt(2 (V(1) - V(m))) = sqrt(2 int_m^1 f).  The tail integral is
    // evaluated directly per node (composite Gauss), which keeps full relative
    // accuracy where m is exponentially close to +-1 — a cumulative V table
    // would cancel catastrophically there and floor m' near 1e-9.
    auto f0 = [&](double u) { return eval_reaction(rt, u, 0); };
    auto tail_integral = [&](double a) {
        double acc = 0.0;
        const int panels = 8;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + (1.0 - a) * k / panels;
            const double hi = a + (1.0 - a) * (k + 1) / panels;
            acc += gauss5(f0, lo, hi);
        }
        return acc;
    };
    const int n = grid.n_points;
    p.m1 = Field(grid);
    p.m2 = Field(grid);
    p.m3 = Field(grid);
    for (int i = 0; i < n; ++i) {
        const double s = std::max(0.0, 2.0 * tail_integral(m[static_cast<size_t>(i)]));
        p.m1[i] = std::sqrt(s);
        p.m2[i] = -eval_reaction(rt, m[static_cast<size_t>(i)], 0);
        p.m3[i] = -eval_reaction(rt, m[static_cast<size_t>(i)], 1) * p.m1[i];
    }
    p.l2_norm_mprime = norm_l2(p.m1);

    // Tail decay fit: least-squares slope of log m' on [L/2, L-1].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        if (x < grid.half_length / 2.0 || x > grid.half_length - 1.0) continue;
        if (p.m1[i] < 1e-280) continue;
        const double y = std::log(p.m1[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double denom = cnt * sxx - sx * sx;
        p.decay_constant = -(cnt * sxy - sx * sy) / denom;
    }
    return p;
}

Field discrete_steady_state(const ReactionTerm& rt, const GridSpec& grid, double tol,
                            const Profile* init) {
    if (grid.boundary != Boundary::dirichlet_pm1)
        throw ValidationError("discrete_steady_state: grid boundary must be dirichlet_pm1");
    std::vector<double> guess;
    if (init != nullptr) {
        guess.resize(static_cast<size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i) guess[static_cast<size_t>(i)] = init->m_at(grid.x(i));
    } else {
        guess = initial_guess(rt, grid);
    }
    int iters = 0;
    double res = 0.0;
    std::vector<double> m = newton_profile(rt, grid, tol, /*numerov=*/false, std::move(guess),
                                           iters, res);
    Field out(grid);
    out.values = std::move(m);
    return out;
}

Field translate_profile(const Profile& p, const GridSpec& grid, double theta) {
    Field out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = p.m_at(grid.x(i) - theta);
    return out;
}

Field translate_profile_d1(const Profile& p, const GridSpec& grid, double theta) {
    Field out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = p.m1_at(grid.x(i) - theta);
    return out;
}

Field translate_profile_d2(const Profile& p, const GridSpec& grid, double theta) {
    Field out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = p.m2_at(grid.x(i) - theta);
    return out;
}

void profile_to_dir(const Profile& p, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    field_to_csv(p.m, dir + "/m.csv");
    field_to_csv(p.m1, dir + "/m1.csv");
    field_to_csv(p.m2, dir + "/m2.csv");
    field_to_csv(p.m3, dir + "/m3.csv");
    std::ofstream meta(dir + "/profile.json");
    meta.precision(17);
    meta << "{\n"
         << "  \"c0\": " << p.decay_constant << ",\n"
         << "  \"l2_norm_mprime\": " << p.l2_norm_mprime << ",\n"
         << "  \"residual\": " << p.residual_sup << ",\n"
         << "  \"grid\": {\"half_length\": " << p.grid.half_length << ", \"spacing\": "
         << p.grid.spacing << ", \"n_points\": " << p.grid.n_points << ", \"boundary\": \""
         << boundary_name(p.grid.boundary) << "\"}\n"
         << "}\n";
}

}  // namespace aclab
