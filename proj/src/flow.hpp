#pragma once

#include <vector>

#include "grid.hpp"
#include "profile.hpp"
#include "reaction.hpp"
#include "tridiag.hpp"

namespace aclab {

// Operational neighborhood radius: states within this L-inf distance of the
// translate family are treated as admissible for center extraction.
constexpr double kNeighborhoodBeta = 0.1;

// Semi-implicit stepper for  u_t = Lap(u) + f(u):  implicit Laplacian
// (tridiagonal solve), explicit reaction.  The factorization is cached, so
// reuse one stepper for long runs.
class DeterministicStepper {
  public:
    DeterministicStepper(const GridSpec& grid, double dt, const ReactionTerm& rt);

    // One step in place; throws NumericError when |u|_sup exceeds the
    // reaction sup bound.
    void step(std::vector<double>& u) const;
    // Variant without the reaction term (linear heat step), used by the
    // linear stochastic equation.
    void step_linear(std::vector<double>& u) const;
    // Step with an extra additive increment (noise) injected before the
    // implicit solve; no sup-bound throw — returns sup|u| so stochastic
    // callers can mark paths invalid instead.  include_reaction toggles f.
    double step_forced(std::vector<double>& u, const double* forcing,
                       bool include_reaction) const;

    double dt() const { return dt_; }
    const GridSpec& grid() const { return grid_; }

  private:
    GridSpec grid_;
    double dt_;
    ReactionTerm rt_;
    Tridiag solver_;
    double ghost_l_ = 0.0, ghost_r_ = 0.0;  // constant Dirichlet contributions
};

Field step_deterministic(const Field& v, double dt, const ReactionTerm& rt);

// Flow v for duration t; dt defaults to the unconditional-stability choice.
Field flow_state(const Field& v, double t, const ReactionTerm& rt, double dt = 0.01);

struct FlowCheckpoint {
    double t;
    Field state;
};

struct FlowResult {
    std::vector<FlowCheckpoint> checkpoints;
    double limit_center = 0.0;  // center of the final state
    double fitted_rate = 0.0;   // exponential decay rate of dist to the family
    bool converged = false;
};

FlowResult run_flow(const Field& v, double t_total, double checkpoint_every, const Profile& p,
                    const ReactionTerm& rt, double dt = 0.01);

// The unique root of g(eta) = <v, m'_eta>: bracketing bisection on
// [guess-1, guess+1] followed by Newton with g'(eta) = -<v, m''_eta>.
double linear_center(const Field& v, const Profile& p);
double linear_center(const Field& v, const Profile& p, double guess);

// inf_theta |v - m_theta|_sup via golden-section search seeded at the linear
// center (coarse scan fallback when no center exists).
double dist_to_manifold(const Field& v, const Profile& p);

struct ZetaResult {
    double zeta = 0.0;
    double error_estimate = 0.0;
    double t_used = 0.0;
    bool converged = false;
};

// Limiting front position: flow, then read off the linear center; stops early
// once successive centers agree to tol.
ZetaResult zeta_detailed(const Field& v, const Profile& p, const ReactionTerm& rt,
                         double t_flow = 10.0, double tol = 1e-8, double dt = 0.01);
double zeta(const Field& v, const Profile& p, const ReactionTerm& rt, double t_flow = 10.0,
            double tol = 1e-8, double dt = 0.01);

struct RateResult {
    double rate = 0.0;
    bool floored = false;  // distance was below the fit floor before the window
};

// Least-squares slope of log dist(F^t v, family) over t in [1, 8].
RateResult measure_convergence_rate(const Field& v, const Profile& p, const ReactionTerm& rt,
                                    double dt = 0.01);

}  // namespace aclab
