#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "correctors.hpp"
#include "cutoff.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "profile.hpp"

using namespace aclab;

namespace {

struct Fixture {
    GridSpec grid = build_grid(16.0, 0.1, Boundary::dirichlet_pm1);
    ReactionTerm rt = ReactionTerm::cubic();
    Profile profile = solve_profile(rt, grid);
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

Field front_plus_bump(const Profile& p, const GridSpec& g, double theta, double amp,
                      double center, double width) {
    Field v = translate_profile(p, g, theta);
    for (int i = 0; i < g.n_points; ++i) {
        const double z = (g.x(i) - center) / width;
        v[i] += amp * std::exp(-0.5 * z * z);
    }
    return v;
}

}  // namespace

TEST_CASE("alpha1: closed form against the kernel quadrature route") {
    const auto& f = fixture();
    Alpha1Result r = alpha1_detailed(f.profile, f.rt);
    // 1/|m'| with |m'|^2 = 2 sqrt(2)/3 for the cubic reaction.
    const double exact = 1.0 / std::sqrt(2.0 * std::sqrt(2.0) / 3.0);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-6));
    CHECK(r.quadrature_route == doctest::Approx(exact).epsilon(1e-3));
    CHECK(r.discrepancy < 1e-3);
    CHECK(alpha1(f.profile, f.rt) == r.value);
}

TEST_CASE("psi1 vanishes on the family and is antisymmetric under reflection") {
    const auto& f = fixture();
    for (double theta : {0.0, 0.7}) {
        Field v = translate_profile(f.profile, f.grid, theta);
        CHECK(std::abs(psi1(v, f.profile, f.rt)) < 1e-4);
    }
    // Reflecting the state (x -> -x, v -> -v) maps the front to itself with
    // the opposite orientation convention; psi1 flips sign.
    Field v = front_plus_bump(f.profile, f.grid, 0.0, 0.04, 1.2, 1.0);
    Field w(f.grid);
    for (int i = 0; i < v.size(); ++i) w[i] = -v[v.size() - 1 - i];
    const double a = psi1(v, f.profile, f.rt);
    const double b = psi1(w, f.profile, f.rt);
    CHECK(a == doctest::Approx(-b).epsilon(1e-6));
    CHECK(std::abs(a) > 1e-4);  // genuinely nonzero off the family
}

TEST_CASE("psi1 is controlled by the distance to the family") {
    const auto& f = fixture();
    double worst_ratio = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double amp = 0.01 + 0.01 * k;
        Field v = front_plus_bump(f.profile, f.grid, 0.2, amp, -0.8, 1.1);
        const double d = dist_to_manifold(v, f.profile);
        REQUIRE(d > 0.0);
        worst_ratio = std::max(worst_ratio, std::abs(psi1(v, f.profile, f.rt)) / d);
    }
    CHECK(worst_ratio < 5.0);  // one uniform constant across the family
}

TEST_CASE("orthogonality of Dzeta with the flow direction") {
    const auto& f = fixture();
    for (double amp : {0.02, 0.05}) {
        Field v = front_plus_bump(f.profile, f.grid, -0.3, amp, 0.6, 1.3);
        Field dir = laplacian(v);
        for (int i = 0; i < v.size(); ++i) dir[i] += eval_reaction(f.rt, v[i], 0);
        const double resid = orthogonality_residual(v, f.profile, f.rt);
        CHECK(std::abs(resid) < 5e-3 * norm_l2(dir));
    }
}

TEST_CASE("alpha2 direct quadrature: frozen value and analytic head") {
    ReactionTerm rt = ReactionTerm::cubic();
    // Coarser, faster settings than the production defaults; the value must
    // stay within a few percent of the converged reference 2.4381.
    Alpha2Options o;
    o.half_length = 16.0;
    o.spacing = 0.1;
    o.horizon = 10.0;
    Alpha2Result r = alpha2_detailed(rt, o);
    CHECK(r.value == doctest::Approx(2.4381).epsilon(0.03));
    // The short-time amplitude is analytic for the cubic reaction: -3/sqrt(pi).
    CHECK(r.head_coefficient == doctest::Approx(-3.0 / std::sqrt(M_PI)).epsilon(1e-2));
    CHECK(r.tail_estimate < o.tail_gate);
    // Zeroing f'' in the integrand kills the drift coefficient entirely.
    Alpha2Options zero = o;
    zero.zero_second_derivative_hook = true;
    CHECK(std::abs(alpha2(rt, zero)) < 1e-12);
}

TEST_CASE("alpha2 cross-check route is translation-equivariant and consistent") {
    ReactionTerm rt = ReactionTerm::cubic();
    Alpha2CrossOptions o;
    o.kernel.head_time = 0.16;  // resolved head; the automatic window is over-wide at h = 0.1
    const double a0 = alpha2_cross_check(rt, 0.0, o);
    const double a1 = alpha2_cross_check(rt, 0.5, o);   // lattice-commensurate
    const double a2 = alpha2_cross_check(rt, -1.3, o);
    CHECK(a1 == doctest::Approx(a0).epsilon(1e-3));
    CHECK(a2 == doctest::Approx(a0).epsilon(1e-3));
    // Agreement with the direct quadrature route within a few percent.
    CHECK(a0 == doctest::Approx(2.4381).epsilon(0.05));
}

TEST_CASE("psibar1 integrates psi1 along the flow") {
    const auto& f = fixture();
    Field v = front_plus_bump(f.profile, f.grid, 0.0, 0.05, 0.9, 1.0);
    Psibar1Result r = psibar1_detailed(v, 8.0, f.profile, f.rt);
    REQUIRE(r.sample_times.size() == r.sample_values.size());
    REQUIRE(r.sample_times.size() >= 10);
    CHECK(r.tail_estimate < 1e-4);
    // First sample is psi1(v) itself; the samples decay towards zero.
    CHECK(r.sample_values.front() == doctest::Approx(psi1(v, f.profile, f.rt)).epsilon(1e-8));
    CHECK(std::abs(r.sample_values.back()) < 0.05 * std::abs(r.sample_values.front()));
    // Too short a horizon trips the tail gate.
    CHECK_THROWS_AS(psibar1(v, 1.0, f.profile, f.rt), NumericError);
}

TEST_CASE("corrector1 scales with the noise cutoff and validates its inputs") {
    const auto& f = fixture();
    CorrectorSpec spec;
    spec.epsilon = 0.04;
    spec.gamma = 0.25;
    CHECK(spec.gamma_prime() == doctest::Approx(0.5));
    // Front far outside the cutoff support: exactly zero, no flow needed.
    Field far = front_plus_bump(f.profile, f.grid, 9.0, 0.03, 9.5, 1.0);
    CHECK(corrector1(far, spec, f.profile, f.rt) == 0.0);
    // Inside the support the corrector equals the explicit product.
    Field v = front_plus_bump(f.profile, f.grid, 0.0, 0.05, 0.9, 1.0);
    const double val = corrector1(v, spec, f.profile, f.rt);
    const double z = zeta(v, f.profile, f.rt);
    const double a = cutoff_a(std::sqrt(spec.epsilon) * z);
    const double pb = psibar1(v, 8.0, f.profile, f.rt);
    const double expect = 0.5 * std::pow(spec.epsilon, 2.0 * spec.gamma_prime()) * a * a * pb;
    CHECK(val == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("functional identity: flow derivative of psibar1 balances psi1") {
    const auto& f = fixture();
    Field v = front_plus_bump(f.profile, f.grid, 0.0, 0.04, 0.7, 1.2);
    PdeResidual r = functional_pde_residual(v, f.profile, f.rt);
    const double scale = std::max(std::abs(r.term_flow), std::abs(r.term_trace));
    REQUIRE(scale > 1e-4);
    CHECK(r.relative == doctest::Approx(r.residual / scale).epsilon(1e-12));
    CHECK(r.relative < 0.05);
}
