#pragma once

#include <vector>

#include "grid.hpp"
#include "profile.hpp"
#include "reaction.hpp"

namespace aclab {

// The linearized operator around the front:  A = -Lap - f'(m), acting with
// zero Dirichlet boundary (everything of interest decays exponentially).
//
// The potential is evaluated on the steady state of the *three-point*
// discretization, so the discrete translation mode is an exact null vector
// and the bottom eigenvalue sits at zero to solver precision.
struct LinearizedOperator {
    GridSpec grid;       // dirichlet_zero action grid
    Field potential;     // f'(m) sampled on the grid
    Field steady_state;  // the discrete steady front used for the potential
};

LinearizedOperator assemble(const Profile& p, const ReactionTerm& rt);

// A v with zero-Dirichlet ghosts.
Field apply_operator(const LinearizedOperator& op, const Field& v);

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<Field> eigenfields;   // unit L2 norm
    std::vector<double> residuals;    // |A v - lambda v|_2 per pair
};

// k lowest eigenpairs of the symmetric tridiagonal discretization (LAPACK).
SpectrumResult spectrum(const LinearizedOperator& op, int k);

// Orthogonal projection onto span{m'}:  (v, m')/|m'|^2 * m'.
Field project_P(const Field& v, const Profile& p);
Field project_P_perp(const Field& v, const Profile& p);

// e^{-tA} v by Crank-Nicolson with dt = min(0.01, t/100).
Field semigroup_apply(const LinearizedOperator& op, double t, const Field& v);

}  // namespace aclab
