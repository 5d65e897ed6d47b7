#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace aclab {

// Boundary handling for the discrete Laplacian and the time steppers.
//  - dirichlet_pm1 : ghost values fixed at -1 (left) and +1 (right); used for
//    front-like states connecting the two stable phases.
//  - dirichlet_zero: ghost values 0; used for perturbations, kernels, and the
//    linear stochastic equation.
//  - neumann      : ghost reflects the first interior neighbour (zero slope).
enum class Boundary { dirichlet_pm1, dirichlet_zero, neumann };

std::string boundary_name(Boundary b);
Boundary boundary_from_name(const std::string& name);

// Uniform grid on [-half_length, half_length] with n_points = 2L/h + 1 nodes.
struct GridSpec {
    double half_length = 0.0;
    double spacing = 0.0;
    int n_points = 0;
    Boundary boundary = Boundary::dirichlet_pm1;

    double x(int i) const { return -half_length + spacing * i; }
    // Fractional (possibly out-of-range) index of a physical coordinate.
    double index_of(double x) const { return (x + half_length) / spacing; }
    bool same_geometry(const GridSpec& o) const {
        return n_points == o.n_points && half_length == o.half_length && spacing == o.spacing;
    }
};

// Validates commensurability (2L/h must be an integer) and positivity.
GridSpec build_grid(double half_length, double spacing, Boundary boundary);

// A real-valued function sampled on a grid; the universal state object.
struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n_points), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

// Throws ValidationError if the field contains non-finite values or its
// length disagrees with the grid.
void check_field(const Field& v, const char* context);

// Second-order central differences with boundary rows following grid.boundary.
Field laplacian(const Field& v);

// (sum_i e^{p*lambda*|x_i|} |v_i|^p h)^(1/p); for p = +infinity the weighted
// sup max_i e^{lambda*|x_i|}|v_i|.  Throws on exponent overflow.
double weighted_norm(const Field& v, double p, double lambda);

// Plain discrete L2 inner product  h * sum_i a_i b_i.
double inner(const Field& a, const Field& b);
double norm_l2(const Field& v);
double norm_sup(const Field& v);

// CSV serialization with header "x,value" at full double precision.
void field_to_csv(const Field& v, const std::string& path);
Field field_from_csv(const std::string& path, Boundary boundary = Boundary::dirichlet_pm1);

}  // namespace aclab
