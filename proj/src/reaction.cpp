#include "reaction.hpp"

#include <cmath>

namespace aclab {

ReactionTerm ReactionTerm::custom(std::function<double(double)> f, std::function<double(double)> f1,
                                  std::function<double(double)> f2, std::function<double(double)> f3,
                                  double sup_bound) {
    ReactionTerm rt;
    rt.kind = Kind::custom;
    rt.fn[0] = std::move(f);
    rt.fn[1] = std::move(f1);
    rt.fn[2] = std::move(f2);
    rt.fn[3] = std::move(f3);
    rt.sup_bound = sup_bound;
    // Sign structure required of the nonlinearity: three zeros, stable at +-1.
    if (std::abs(rt.fn[0](-1.0)) > 1e-12 || std::abs(rt.fn[0](0.0)) > 1e-12 ||
        std::abs(rt.fn[0](1.0)) > 1e-12)
        throw ValidationError("custom reaction: f must vanish at -1, 0, +1");
    if (!(rt.fn[1](1.0) < 0.0) || !(rt.fn[1](-1.0) < 0.0) || !(rt.fn[1](0.0) > 0.0))
        throw ValidationError("custom reaction: need f'(+-1) < 0 and f'(0) > 0");
    return rt;
}

double eval_reaction(const ReactionTerm& rt, double u, int order) {
    if (order < 0 || order > 3)
        throw ValidationError("eval_reaction: unsupported derivative order " + std::to_string(order));
    if (rt.kind == ReactionTerm::Kind::cubic) {
        switch (order) {
            case 0: return u - u * u * u;
            case 1: return 1.0 - 3.0 * u * u;
            case 2: return -6.0 * u;
            default: return -6.0;
        }
    }
    return rt.fn[order](u);
}

double sup_fprime(const ReactionTerm& rt, double bound) {
    ReactionTerm copy = rt;
    copy.sup_bound = bound;
    return sup_fprime(copy);
}

double sup_fprime(const ReactionTerm& rt) {
    if (rt.kind == ReactionTerm::Kind::cubic) {
        // |1 - 3u^2| on [-M, M] is maximized at the endpoints for M >= 1.
        const double M = rt.sup_bound;
        return std::max(1.0, std::abs(1.0 - 3.0 * M * M));
    }
    double best = 0.0;
    const double M = rt.sup_bound;
    for (int i = 0; i <= 400; ++i) {
        const double u = -M + 2.0 * M * i / 400.0;
        best = std::max(best, std::abs(rt.fn[1](u)));
    }
    return best;
}

}  // namespace aclab
