#pragma once

#include <cmath>

namespace aclab {

// Default noise cutoff: smooth, even, compactly supported in (-1,1).
//   a(x) = exp(1 - 1/(1-x^2)) for |x| < 1, 0 otherwise.
inline double cutoff_a(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / s);
}

inline double cutoff_a_prime(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    return cutoff_a(x) * (-2.0 * x) / (s * s);
}

}  // namespace aclab
