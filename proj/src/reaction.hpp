#pragma once

#include <functional>

#include "errors.hpp"

namespace aclab {

// Bistable reaction nonlinearity with zeros at -1, 0, +1.  The built-in kind
// is the cubic f(u) = u - u^3; custom evaluators may supply any nonlinearity
// satisfying the same sign structure and oddness.
struct ReactionTerm {
    enum class Kind { cubic, custom };
    Kind kind = Kind::cubic;
    // Used only for kind == custom; entries are f, f', f'', f'''.
    std::function<double(double)> fn[4];
    // Runtime sup-norm guard: solution monitors enforce |u| <= sup_bound.
    double sup_bound = 2.0;

    static ReactionTerm cubic() { return ReactionTerm{}; }
    static ReactionTerm custom(std::function<double(double)> f, std::function<double(double)> f1,
                               std::function<double(double)> f2, std::function<double(double)> f3,
                               double sup_bound = 2.0);
};

// f^(order)(u) for order in 0..3.
double eval_reaction(const ReactionTerm& rt, double u, int order);

// Largest |f'| over [-sup_bound, sup_bound], sampled; used for dt limits and
// mean-value bounds.
double sup_fprime(const ReactionTerm& rt);
// Same, but over [-bound, bound] instead of the term's own sup_bound.
double sup_fprime(const ReactionTerm& rt, double bound);

}  // namespace aclab
