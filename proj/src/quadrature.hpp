#pragma once

#include <functional>

namespace aclab {

// Adaptive Simpson quadrature on [a, b] with absolute tolerance tol.
// Used as an independent oracle for grid quadratures and for the stochastic
// variance identity.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

// Fixed 5-point Gauss-Legendre rule on [a, b]; exact for degree <= 9.
double gauss5(const std::function<double(double)>& f, double a, double b);

}  // namespace aclab
