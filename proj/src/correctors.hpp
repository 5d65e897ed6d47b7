#pragma once

#include <vector>

#include "kernels.hpp"
#include "profile.hpp"
#include "reaction.hpp"

namespace aclab {

// --- Limit coefficients -----------------------------------------------------

struct Alpha1Result {
    double value = 0.0;             // 1/|m'|_{L2}
    double quadrature_route = 0.0;  // (integral of Dzeta(y;m)^2 dy)^{1/2}
    double discrepancy = 0.0;
};

// Diffusion coefficient of the limit equation.  Returns 1/|m'|; the kernel
// quadrature route is computed as a consistency check and a discrepancy above
// 1e-3 raises a NumericError.
Alpha1Result alpha1_detailed(const Profile& p, const ReactionTerm& rt);
double alpha1(const Profile& p, const ReactionTerm& rt);

struct Alpha2Options {
    double half_length = 20.0;
    double spacing = 0.05;
    double dt = 0.01;
    double horizon = 12.0;
    double tail_gate = 1e-4;        // bound on the truncated time tail
    bool zero_second_derivative_hook = false;  // replace f'' by 0 in the integrand
};

struct Alpha2Result {
    double value = 0.0;
    double head_coefficient = 0.0;  // amplitude of the 1/sqrt(t) short-time part
    double tail_estimate = 0.0;
    double horizon = 0.0;
};

// Drift coefficient by the direct kernel quadrature
//   -(1/|m'|) integral over t,y,z of y p_t(y,z;m)^2 f''(m(z)) m'(z),
// with an analytic 1/sqrt(t) head below the grid resolution time and a
// trapezoid beyond.  Solves its own profile on the stated grid.
Alpha2Result alpha2_detailed(const ReactionTerm& rt, Alpha2Options o = {});
double alpha2(const ReactionTerm& rt, Alpha2Options o = {});

struct Alpha2CrossOptions {
    double half_length = 16.0;
    double spacing = 0.1;
    KernelOptions kernel;
};

// Cross-check route:  integral of (y - theta) D2zeta(y,y; m_theta) dy.
// For theta on the grid lattice the base state is the exactly-translated
// discrete steady front, so the computation is translation-equivariant.
double alpha2_cross_check(const ReactionTerm& rt, double theta, Alpha2CrossOptions o = {});

// --- The first-order corrector functionals ----------------------------------

// psi1(v) = integral of D2zeta(y,y;v) dy  (h-weighted sum of d2zeta_diag).
double psi1(const Field& v, const Profile& p, const ReactionTerm& rt, KernelOptions ko = {});

struct Psibar1Options {
    double sample_spacing = 0.5;  // flow checkpoints between psi1 evaluations
    double tail_tol = 1e-4;       // gate on the estimated truncated tail
    double flow_dt = 0.01;
    KernelOptions kernel;
};

struct Psibar1Result {
    double value = 0.0;
    double tail_estimate = 0.0;
    std::vector<double> sample_times;
    std::vector<double> sample_values;  // psi1 along the flow
};

// psibar1(v) = integral over t in [0, T_max] of psi1(F^t v), composite
// trapezoid over flow checkpoints; raises NumericError when the fitted
// exponential tail exceeds the tolerance (increase T_max).
Psibar1Result psibar1_detailed(const Field& v, double T_max, const Profile& p,
                               const ReactionTerm& rt, Psibar1Options o = {});
double psibar1(const Field& v, double T_max, const Profile& p, const ReactionTerm& rt,
               Psibar1Options o = {});

struct CorrectorSpec {
    int order = 1;          // only 1 is evaluable
    double epsilon = 0.05;
    double gamma = 0.25;
    double gamma_prime() const { return gamma + 0.25; }
};

// First-order corrector  0.5 eps^{2 gamma'} a(sqrt(eps) zeta(v))^2 psibar1(v).
// Returns exactly 0 without flowing when the cutoff vanishes at zeta(v).
double corrector1(const Field& v, const CorrectorSpec& spec, const Profile& p,
                  const ReactionTerm& rt, double T_max = 8.0, Psibar1Options o = {});

// --- Cancellation identities ------------------------------------------------

// <Dzeta(v), Lap v + f(v)>  (exactly zero in the continuum).
double orthogonality_residual(const Field& v, const Profile& p, const ReactionTerm& rt,
                              KernelOptions ko = {});

struct PdeResidualOptions {
    double fd_sup = 1e-3;      // sup-norm of the finite-difference perturbation
    double window = 8.0;       // direction support window around zeta(v)
    double window_tol = 0.02;  // admissible relative L2 mass outside the window
    double T_max = 6.0;
    Psibar1Options psibar;
};

struct PdeResidual {
    double term_flow = 0.0;   // <D psibar1(v), Lap v + f(v)> (finite differences)
    double term_trace = 0.0;  // psi1(v)
    double residual = 0.0;
    double relative = 0.0;    // residual / max term magnitude
};

// Residual of the first-order functional identity
//   <D psibar1(v), Lap v + f(v)> + psi1(v) = 0.
// The directional derivative is a central finite difference of psibar1 in the
// direction Lap v + f(v), masked to the window around zeta(v); by linearity
// this equals the windowed coordinate-wise gradient paired with the direction.
PdeResidual functional_pde_residual(const Field& v, const Profile& p, const ReactionTerm& rt,
                                    PdeResidualOptions o = {});

}  // namespace aclab
