#pragma once

#include <vector>

namespace aclab {

// Tridiagonal system solver (Thomas algorithm with a cached LU split).  All
// systems in this code base are strictly diagonally dominant, so no pivoting
// is needed.  One factorization serves many right-hand sides (the kernel
// matrix evolution solves the same system for every column).
class Tridiag {
  public:
    Tridiag() = default;
    Tridiag(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : lo_(std::move(lower)), di_(std::move(diag)), up_(std::move(upper)) {
        factor();
    }

    int size() const { return static_cast<int>(di_.size()); }

    // In-place solve of T x = b.
    void solve(double* b) const {
        const int n = size();
        for (int i = 1; i < n; ++i) b[i] -= l_[static_cast<size_t>(i)] * b[i - 1];
        b[n - 1] *= inv_d_[static_cast<size_t>(n) - 1];
        for (int i = n - 2; i >= 0; --i)
            b[i] = (b[i] - up_[static_cast<size_t>(i)] * b[i + 1]) * inv_d_[static_cast<size_t>(i)];
    }

    void solve(std::vector<double>& b) const { solve(b.data()); }

    // y = T x (matrix apply, independent of the factorization).
    void apply(const double* x, double* y) const {
        const int n = size();
        for (int i = 0; i < n; ++i) {
            double acc = di_[static_cast<size_t>(i)] * x[i];
            if (i > 0) acc += lo_[static_cast<size_t>(i) - 1] * x[i - 1];
            if (i + 1 < n) acc += up_[static_cast<size_t>(i)] * x[i + 1];
            y[i] = acc;
        }
    }

  private:
    void factor() {
        const int n = size();
        l_.assign(static_cast<size_t>(n), 0.0);
        inv_d_.assign(static_cast<size_t>(n), 0.0);
        double d = di_[0];
        inv_d_[0] = 1.0 / d;
        for (int i = 1; i < n; ++i) {
            l_[static_cast<size_t>(i)] = lo_[static_cast<size_t>(i) - 1] * inv_d_[static_cast<size_t>(i) - 1];
            d = di_[static_cast<size_t>(i)] - l_[static_cast<size_t>(i)] * up_[static_cast<size_t>(i) - 1];
            inv_d_[static_cast<size_t>(i)] = 1.0 / d;
        }
    }

    std::vector<double> lo_, di_, up_;
    std::vector<double> l_, inv_d_;
};

}  // namespace aclab
