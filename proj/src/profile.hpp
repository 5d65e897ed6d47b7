#pragma once

#include <string>

#include "grid.hpp"
#include "reaction.hpp"

namespace aclab {

// The standing wave m (increasing, m(0) = 0, m(+-inf) = +-1) together with
// its first three derivatives, decay constant and L2 data.
//
// m is solved on a fourth-order compact (Numerov) stencil so the table is
// accurate well beyond the plain three-point truncation error; m' comes from
// the first integral m' = sqrt(2(V(1) - V(m))) with V' = f, and m'' = -f(m),
// m''' = -f'(m) m' follow from differentiating the profile equation (the same
// relations the derivative recursion yields at orders 2 and 3).
struct Profile {
    GridSpec grid;
    Field m, m1, m2, m3;
    double decay_constant = 0.0;   // fitted from the log m' tail slope
    double l2_norm_mprime = 0.0;   // discrete ||m'||_{L2}
    double residual_sup = 0.0;     // sup-norm residual on the solver stencil
    int newton_iterations = 0;

    // Cubic (4-point Lagrange) interpolation of the tables; outside the table
    // m saturates at +-1 and the derivatives at 0.
    double m_at(double x) const;
    double m1_at(double x) const;
    double m2_at(double x) const;
};

// Damped Newton on the compact tridiagonal stencil, initialized from
// tanh(x/sqrt(2)) (cubic) or a generic sigmoid, antisymmetrized every
// iteration so the translation-neutral direction cannot drift.
Profile solve_profile(const ReactionTerm& rt, const GridSpec& grid, double tol = 1e-12);

// Steady state of the *three-point* discretization (the stencil used by the
// time steppers): Newton on the same grid, so that one deterministic step
// leaves it fixed to solver precision.  The linearized operator is built
// around this state, which keeps the discrete translation mode an exact null
// vector.
Field discrete_steady_state(const ReactionTerm& rt, const GridSpec& grid, double tol = 1e-12,
                            const Profile* init = nullptr);

// Translate of the profile sampled on a target grid: m(x - theta).
Field translate_profile(const Profile& p, const GridSpec& grid, double theta);
// Same for m' and m''.
Field translate_profile_d1(const Profile& p, const GridSpec& grid, double theta);
Field translate_profile_d2(const Profile& p, const GridSpec& grid, double theta);

// Serialize as a directory of CSVs plus profile.json metadata.
void profile_to_dir(const Profile& p, const std::string& dir);

}  // namespace aclab
