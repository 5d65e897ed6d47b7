#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "linop.hpp"
#include "profile.hpp"
#include "rng.hpp"

using namespace aclab;

namespace {

struct Fixture {
    GridSpec grid = build_grid(16.0, 0.05, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile profile = solve_profile(rt, grid);
    LinearizedOperator op = assemble(profile, rt);
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("potential matches f'(m) of the front") {
    const auto& f = fixture();
    // For the cubic reaction f'(u) = 1 - 3u^2, so at the front center the
    // potential is 1 and in the bulk it approaches -2.
    const int mid = f.op.grid.n_points / 2;
    CHECK(f.op.potential[mid] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.op.potential[2] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(f.op.potential[f.op.grid.n_points - 3] == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("operator annihilates the discrete translation mode") {
    const auto& f = fixture();
    // Central differences of the discrete steady state approximate the
    // translation mode to stencil order, so the relative residual scales
    // like h^2 (2.5e-3 here).
    Field d(f.op.grid);
    for (int i = 1; i + 1 < d.size(); ++i)
        d[i] = (f.op.steady_state[i + 1] - f.op.steady_state[i - 1]) / (2.0 * f.op.grid.spacing);
    Field Ad = apply_operator(f.op, d);
    CHECK(norm_l2(Ad) / norm_l2(d) < 2.0 * f.op.grid.spacing * f.op.grid.spacing);
}

TEST_CASE("low spectrum: null eigenvalue and gap") {
    const auto& f = fixture();
    SpectrumResult s = spectrum(f.op, 3);
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-8);
    CHECK(s.eigenvalues[1] == doctest::Approx(1.5).epsilon(2e-3));
    CHECK(s.eigenvalues[2] > 1.9);  // continuum threshold
    for (double r : s.residuals) CHECK(r < 1e-8);
    // Ground eigenfield is the translation mode: cosine similarity with m'.
    Field mp = translate_profile_d1(f.profile, f.op.grid, 0.0);
    const double cosine =
        std::abs(inner(s.eigenfields[0], mp)) / (norm_l2(s.eigenfields[0]) * norm_l2(mp));
    CHECK(cosine > 1.0 - 1e-6);
    // Second eigenfield is odd: for the cubic reaction it is proportional to
    // sech(x/sqrt2) tanh(x/sqrt2).
    Field e1(f.op.grid);
    for (int i = 0; i < e1.size(); ++i) {
        const double z = f.op.grid.x(i) / std::sqrt(2.0);
        e1[i] = std::tanh(z) / std::cosh(z);
    }
    const double cos1 =
        std::abs(inner(s.eigenfields[1], e1)) / (norm_l2(s.eigenfields[1]) * norm_l2(e1));
    CHECK(cos1 > 1.0 - 1e-4);
}

TEST_CASE("projections are idempotent, orthogonal and complementary") {
    const auto& f = fixture();
    RngStream rng(3, RngPurpose::generic_draws, 0);
    Field v(f.op.grid);
    for (int i = 0; i < v.size(); ++i) {
        const double x = f.op.grid.x(i);
        v[i] = std::exp(-0.1 * x * x) * rng.normal(0, static_cast<uint32_t>(i));
    }
    Field pv = project_P(v, f.profile);
    Field qv = project_P_perp(v, f.profile);
    Field ppv = project_P(pv, f.profile);
    for (int i = 0; i < v.size(); ++i) {
        CHECK(pv[i] + qv[i] == doctest::Approx(v[i]).epsilon(1e-12));
        CHECK(ppv[i] == doctest::Approx(pv[i]).epsilon(1e-10));
    }
    Field mp = translate_profile_d1(f.profile, f.op.grid, 0.0);
    CHECK(std::abs(inner(qv, mp)) / (norm_l2(qv) * norm_l2(mp)) < 1e-10);
}

TEST_CASE("semigroup preserves the null mode and decays the complement") {
    const auto& f = fixture();
    SpectrumResult s = spectrum(f.op, 2);
    // e^{-tA} e_0 = e_0.
    Field kept = semigroup_apply(f.op, 2.0, s.eigenfields[0]);
    double diff = 0.0;
    for (int i = 0; i < kept.size(); ++i)
        diff = std::max(diff, std::abs(kept[i] - s.eigenfields[0][i]));
    CHECK(diff < 1e-6);
    // e^{-tA} e_1 = e^{-lambda_1 t} e_1.
    Field e1t = semigroup_apply(f.op, 1.0, s.eigenfields[1]);
    CHECK(norm_l2(e1t) == doctest::Approx(std::exp(-s.eigenvalues[1])).epsilon(1e-3));
}

TEST_CASE("semigroup decay rate of projected random data matches the gap") {
    const auto& f = fixture();
    RngStream rng(17, RngPurpose::generic_draws, 0);
    for (int trial = 0; trial < 3; ++trial) {
        Field v(f.op.grid);
        for (int b = 0; b < 5; ++b) {
            const double amp = rng.normal(static_cast<uint32_t>(trial), 2u * b);
            const double ctr = 6.0 * (rng.uniform(static_cast<uint32_t>(trial), 2u * b + 1) - 0.5);
            for (int i = 0; i < v.size(); ++i) {
                const double z = f.op.grid.x(i) - ctr;
                v[i] += amp * std::exp(-0.5 * z * z);
            }
        }
        Field w = project_P_perp(v, f.profile);
        std::vector<double> ts, ys;
        Field cur = semigroup_apply(f.op, 1.0, w);
        double t = 1.0;
        while (t < 5.0 + 1e-9) {
            ts.push_back(t);
            ys.push_back(std::log(norm_l2(cur)));
            cur = semigroup_apply(f.op, 0.5, cur);
            t += 0.5;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ts.size());
        for (size_t i = 0; i < ts.size(); ++i) {
            sx += ts[i]; sy += ys[i]; sxx += ts[i] * ts[i]; sxy += ts[i] * ys[i];
        }
        const double rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(rate == doctest::Approx(1.5).epsilon(0.10));
    }
}
