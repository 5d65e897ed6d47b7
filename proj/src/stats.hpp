#pragma once

#include <cstdint>
#include <vector>

#include "spde.hpp"

namespace aclab {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    size_t n1 = 0, n2 = 0;
};

// Rank-based two-sample Kolmogorov-Smirnov statistic with the asymptotic
// p-value (Stephens' small-sample correction).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MomentRow {
    int order = 0;          // 1 mean, 2 variance, 3 skewness, 4 excess kurtosis
    double value_a = 0.0, se_a = 0.0;
    double value_b = 0.0, se_b = 0.0;
};

// First four moments of both samples with bootstrap standard errors.
std::vector<MomentRow> bootstrap_moments(const std::vector<double>& a,
                                         const std::vector<double>& b, int resamples = 1000,
                                         uint64_t seed = 7);

struct RegressionFit {
    double slope = 0.0;
    double slope_se = 0.0;
    int n_bins = 0;
    int n_obs = 0;
};

struct QvDriftResult {
    RegressionFit diffusion;  // increment second moments vs alpha1^2 a(xi)^2 dt
    RegressionFit drift;      // increment means vs alpha2 a(xi) a'(xi) dt
};

// Binned through-origin regression of interface increments against the
// theoretical local diffusion/drift predictors.  Requires at least
// min_samples interface samples per path.  Increments are taken over `lag`
// consecutive samples: the per-sample smoothing read attenuates quadratic
// variation on scales below the smoothing window, so the lag should keep the
// increment duration well above it.
QvDriftResult empirical_qv_drift(const std::vector<InterfaceSeries>& series, double alpha1,
                                 double alpha2, int n_bins = 16, int min_samples = 50,
                                 int lag = 1);

// Simple OLS y = intercept + slope x with standard errors (log-log scaling
// fits in the acceptance experiments).
struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Order statistic at fraction q in [0,1] (linear interpolation).
double percentile(std::vector<double> v, double q);

}  // namespace aclab
