#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aclab {

std::string boundary_name(Boundary b) {
    switch (b) {
        case Boundary::dirichlet_pm1: return "dirichlet_pm1";
        case Boundary::dirichlet_zero: return "dirichlet_zero";
        case Boundary::neumann: return "neumann";
    }
    return "?";
}

Boundary boundary_from_name(const std::string& name) {
    if (name == "dirichlet_pm1") return Boundary::dirichlet_pm1;
    if (name == "dirichlet_zero") return Boundary::dirichlet_zero;
    if (name == "neumann") return Boundary::neumann;
    throw ValidationError("unknown boundary kind: " + name);
}

GridSpec build_grid(double half_length, double spacing, Boundary boundary) {
    if (!(half_length > 0.0) || !(spacing > 0.0))
        throw ValidationError("grid: half_length and spacing must be positive");
    const double ratio = 2.0 * half_length / spacing;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("grid: 2*half_length/spacing = " + std::to_string(ratio) +
                              " is not an integer; length and spacing are not commensurate");
    GridSpec g;
    g.half_length = half_length;
    g.spacing = spacing;
    g.n_points = static_cast<int>(rounded) + 1;
    g.boundary = boundary;
    return g;
}

void check_field(const Field& v, const char* context) {
    if (v.size() != v.grid.n_points)
        throw ValidationError(std::string(context) + ": field length disagrees with grid");
    for (double x : v.values)
        if (!std::isfinite(x))
            throw ValidationError(std::string(context) + ": non-finite field value");
}

Field laplacian(const Field& v) {
    const int n = v.size();
    const double h2 = v.grid.spacing * v.grid.spacing;
    Field out(v.grid);
    double ghost_l = 0.0, ghost_r = 0.0;
    switch (v.grid.boundary) {
        case Boundary::dirichlet_pm1: ghost_l = -1.0; ghost_r = 1.0; break;
        case Boundary::dirichlet_zero: ghost_l = 0.0; ghost_r = 0.0; break;
        case Boundary::neumann:
            ghost_l = (n > 1) ? v[1] : v[0];
            ghost_r = (n > 1) ? v[n - 2] : v[n - 1];
            break;
    }
    for (int i = 0; i < n; ++i) {
        const double left = (i == 0) ? ghost_l : v[i - 1];
        const double right = (i == n - 1) ? ghost_r : v[i + 1];
        out[i] = (left - 2.0 * v[i] + right) / h2;
    }
    return out;
}

double weighted_norm(const Field& v, double p, double lambda) {
    // For p = inf the weight in the max is just e^{lambda |x|}; only finite p
    // raises the exponent by the power.
    const double p_eff = std::isinf(p) ? 1.0 : std::max(1.0, p);
    const double worst = std::abs(lambda) * v.grid.half_length * p_eff;
    if (worst > 700.0)
        throw ValidationError("weighted_norm: exponent overflow, lambda*L*p = " +
                              std::to_string(lambda * v.grid.half_length * p));
    if (!(p >= 1.0))
        throw ValidationError("weighted_norm: p must be in [1, inf]");
    const int n = v.size();
    if (std::isinf(p)) {
        double best = 0.0;
        for (int i = 0; i < n; ++i)
            best = std::max(best, std::exp(lambda * std::abs(v.grid.x(i))) * std::abs(v[i]));
        return best;
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += std::exp(p * lambda * std::abs(v.grid.x(i))) * std::pow(std::abs(v[i]), p);
    return std::pow(acc * v.grid.spacing, 1.0 / p);
}

double inner(const Field& a, const Field& b) {
    double acc = 0.0;
    const int n = a.size();
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc * a.grid.spacing;
}

double norm_l2(const Field& v) { return std::sqrt(inner(v, v)); }

double norm_sup(const Field& v) {
    double best = 0.0;
    for (double x : v.values) best = std::max(best, std::abs(x));
    return best;
}

void field_to_csv(const Field& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "x,value\n";
    char buf[80];
    for (int i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", v.grid.x(i), v[i]);
        out << buf;
    }
}

Field field_from_csv(const std::string& path, Boundary boundary) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ValidationError("malformed CSV row in " + path + ": " + line);
        xs.push_back(std::stod(a));
        vs.push_back(std::stod(b));
    }
    if (xs.size() < 3) throw ValidationError("CSV too short: " + path);
    const double h = xs[1] - xs[0];
    const double L = -xs.front();
    GridSpec g = build_grid(L, h, boundary);
    if (static_cast<size_t>(g.n_points) != xs.size())
        throw ValidationError("CSV grid is not uniform/symmetric: " + path);
    Field v(g);
    v.values = vs;
    check_field(v, "field_from_csv");
    return v;
}

}  // namespace aclab
