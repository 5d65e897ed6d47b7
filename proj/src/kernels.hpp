#pragma once

#include <functional>
#include <vector>

#include "flow.hpp"
#include "grid.hpp"
#include "profile.hpp"
#include "reaction.hpp"
#include "tridiag.hpp"

namespace aclab {

struct KernelOptions {
    double dt = 0.01;
    double t_extract = 8.0;      // long-time horizon for coefficient extraction
    double residual_gate = 1e-3; // post-projection residual / tail-drift gate
    int max_extraction_doublings = 2;
    int matrix_limit = 512;      // refuse dense pair-function storage above this
    double head_time = 0.0;      // short-time analytic window; 0 = automatic
    double fit_window = 1.5;     // length of the least-squares window past the head
};

// One kernel evaluation: order 1 is the derivative kernel p_t(y, .) of the
// flow map (delta initial datum at y), order 2 the second-derivative kernel
// (zero initial datum, source f''(F^t v) p_t(y1,.) p_t(y2,.)).
struct KernelSlice {
    int order = 1;
    double y1 = 0.0, y2 = 0.0;  // y2 meaningful for order 2 only
    double time = 0.0;
    Field slice;
};

// Kernels of the linearized flow around a fixed admissible base state.
//
// Time discretization: backward-Euler half steps for the first two steps
// (smooths the delta data), then Crank-Nicolson with the background potential
// frozen at the step midpoint.  Every step operator is a rational function of
// the same symmetric tridiagonal matrix, hence symmetric itself; adjoint
// sweeps therefore reuse the forward step operators in reverse order.
//
// An engine instance is not thread-safe; concurrent work should use one
// engine per thread (the background cache is cheap to rebuild).
class KernelEngine {
  public:
    KernelEngine(const Field& base, const Profile& profile, const ReactionTerm& rt,
                 KernelOptions opts = {});

    KernelSlice first_kernel(double y, double t);
    KernelSlice second_kernel(double y1, double y2, double t);

    // Long-time coefficient of the first kernel on m' (adjoint-sweep route;
    // works at any grid size).  Adaptively doubles the extraction time when
    // the tail drift exceeds the gate, then fails with a NumericError.
    Field lambda1();
    // Scalar second-order coefficient for one source pair by projecting the
    // order-2 slice at the extraction time onto m'.
    double lambda2_pair(double y1, double y2);
    // Diagonal of the second-order coefficient function.  Full kernel-matrix
    // evolution with an analytic 1/sqrt(t) short-time head; this is the
    // accurate diagonal (the dense matrix below uses a cruder head).
    Field lambda2_diag();
    // Dense pair function, row-major n x n; grids above matrix_limit refuse.
    std::vector<double> lambda2_matrix();

    // Derivatives of the limiting front position: Dzeta = -lambda1,
    // D2zeta(y,y) = -lambda2_diag.
    Field dzeta();
    Field d2zeta_diag();

    double zeta_base();
    double extraction_time() const { return opts_.t_extract; }
    double lambda1_tail_drift() const { return tail_drift_; }
    bool base_stationary() const { return stationary_; }
    double head_time_resolved() const;

    // Evolve the full kernel matrix (column y = slice over z, column-major,
    // stride n) for t_final; after each step calls
    //   visit(step_index, t_midpoint, P_mid)
    // with the midpoint average of the step.  Used by coefficient quadratures.
    void evolve_matrix(double t_final,
                       const std::function<void(int, double, const std::vector<double>&)>& visit);

    const Field& base() const { return base_; }
    const GridSpec& grid() const { return gz_; }
    const Field& phi();          // m' at the base front position (lazy)
    double phi_norm2();          // discrete |m'|^2 used for projections
    const std::vector<double>& background_mid(int step);  // state at step midpoint

    static constexpr int kStartupSteps = 2;

  private:
    struct StepOps {
        Tridiag cn_solve;   // I - dt/2 (Lap + W)
        Tridiag cn_apply;   // I + dt/2 (Lap + W)
        Tridiag be_solve;   // I - dt/2 (Lap + W), half-step backward Euler
    };

    void ensure_steps(int n_steps);
    const StepOps& ops(int step);
    // One forward (== adjoint) step applied in place to a dirichlet-zero field.
    void apply_step(int step, std::vector<double>& u, std::vector<double>& scratch);
    StepOps build_ops(const std::vector<double>& pot) const;
    int steps_for(double t, const char* context) const;
    Field lambda1_at_horizon(int n_steps);
    void ensure_phi();

    Field base_;
    Profile profile_;
    ReactionTerm rt_;
    KernelOptions opts_;
    GridSpec gz_;          // kernel grid: base geometry, zero-Dirichlet
    bool stationary_ = false;
    double tail_drift_ = 0.0;

    // Background cache (non-stationary base): states at step boundaries and
    // midpoint potentials.  For a stationary base only slot 0 is used.
    std::vector<Field> bg_;
    std::vector<std::vector<double>> bg_mid_;
    std::vector<std::vector<double>> pot_mid_;
    StepOps ops0_;          // stationary step operators
    bool ops0_ready_ = false;
    int scratch_step_ = -1;
    StepOps ops_scratch_;

    bool zeta_ready_ = false;
    double zeta_ = 0.0;
    Field phi_;
    double phi_norm2_ = 0.0;
    bool phi_ready_ = false;
};

}  // namespace aclab
