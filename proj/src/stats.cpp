#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "cutoff.hpp"
#include "errors.hpp"

namespace aclab {

namespace {

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

void central_moments(const std::vector<double>& v, double out[4]) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out[0] = mean;
    out[1] = m2;
    out[2] = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out[3] = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KsResult res;
    res.n1 = a.size();
    res.n2 = b.size();
    size_t i = 0, j = 0;
    double d = 0.0;
    const double inv1 = 1.0 / static_cast<double>(a.size());
    const double inv2 = 1.0 / static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) * inv1 - static_cast<double>(j) * inv2));
    }
    res.statistic = d;
    const double ne = std::sqrt(static_cast<double>(res.n1) * static_cast<double>(res.n2) /
                                static_cast<double>(res.n1 + res.n2));
    res.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    return res;
}

std::vector<MomentRow> bootstrap_moments(const std::vector<double>& a,
                                         const std::vector<double>& b, int resamples,
                                         uint64_t seed) {
    if (a.size() < 2 || b.size() < 2) throw ValidationError("bootstrap_moments: samples too small");
    double base_a[4], base_b[4];
    central_moments(a, base_a);
    central_moments(b, base_b);
    double var_a[4] = {0, 0, 0, 0}, var_b[4] = {0, 0, 0, 0};
    double mean_a[4] = {0, 0, 0, 0}, mean_b[4] = {0, 0, 0, 0};
    RngStream stream(seed, RngPurpose::generic_draws, 0);
    std::vector<double> buf;
    auto accumulate = [&](const std::vector<double>& src, uint32_t tag, double mean[4],
                          double var[4]) {
        buf.resize(src.size());
        for (int r = 0; r < resamples; ++r) {
            for (size_t k = 0; k < src.size(); ++k) {
                const double u = stream.uniform(static_cast<uint32_t>(r),
                                                tag * 0x40000000u + static_cast<uint32_t>(k));
                buf[k] = src[static_cast<size_t>(u * static_cast<double>(src.size())) %
                             src.size()];
            }
            double m[4];
            central_moments(buf, m);
            for (int q = 0; q < 4; ++q) {
                mean[q] += m[q];
                var[q] += m[q] * m[q];
            }
        }
        for (int q = 0; q < 4; ++q) {
            mean[q] /= resamples;
            var[q] = std::max(0.0, var[q] / resamples - mean[q] * mean[q]);
        }
    };
    accumulate(a, 0, mean_a, var_a);
    accumulate(b, 1, mean_b, var_b);
    std::vector<MomentRow> rows;
    for (int q = 0; q < 4; ++q) {
        MomentRow row;
        row.order = q + 1;
        row.value_a = base_a[q];
        row.value_b = base_b[q];
        row.se_a = std::sqrt(var_a[q]);
        row.se_b = std::sqrt(var_b[q]);
        rows.push_back(row);
    }
    return rows;
}

QvDriftResult empirical_qv_drift(const std::vector<InterfaceSeries>& series, double alpha1,
                                 double alpha2, int n_bins, int min_samples, int lag) {
    if (lag < 1) throw ValidationError("empirical_qv_drift: lag must be >= 1");
    std::vector<std::pair<double, double>> qv_obs, drift_obs;  // (predictor, response)
    for (const auto& s : series) {
        if (static_cast<int>(s.samples.size()) < min_samples)
            throw ValidationError("empirical_qv_drift: cadence too coarse (need >= " +
                                  std::to_string(min_samples) + " samples per path)");
        const size_t stride = static_cast<size_t>(lag);
        for (size_t j = 0; j + stride < s.samples.size(); j += stride) {
            const auto& [t0, x0] = s.samples[j];
            const auto& [t1, x1] = s.samples[j + stride];
            const double dt = t1 - t0;
            if (!(dt > 0.0)) continue;
            const double a = cutoff_a(x0);
            const double inc = x1 - x0;
            qv_obs.emplace_back(alpha1 * alpha1 * a * a * dt, inc * inc);
            drift_obs.emplace_back(alpha2 * a * cutoff_a_prime(x0) * dt, inc);
        }
    }
    if (qv_obs.size() < static_cast<size_t>(4 * n_bins))
        throw ValidationError("empirical_qv_drift: not enough increments");

    auto binned_fit = [&](std::vector<std::pair<double, double>>& obs) {
        std::sort(obs.begin(), obs.end());
        RegressionFit fit;
        fit.n_obs = static_cast<int>(obs.size());
        double sxx = 0.0, sxy = 0.0;
        const size_t per = obs.size() / static_cast<size_t>(n_bins);
        int used = 0;
        for (int bth = 0; bth < n_bins; ++bth) {
            const size_t lo = static_cast<size_t>(bth) * per;
            const size_t hi = (bth + 1 == n_bins) ? obs.size() : lo + per;
            if (hi <= lo + 1) continue;
            double mx = 0.0, my = 0.0;
            for (size_t k = lo; k < hi; ++k) {
                mx += obs[k].first;
                my += obs[k].second;
            }
            const double cnt = static_cast<double>(hi - lo);
            mx /= cnt;
            my /= cnt;
            double vy = 0.0;
            for (size_t k = lo; k < hi; ++k) {
                const double d = obs[k].second - my;
                vy += d * d;
            }
            const double se2 = std::max(vy / (cnt * (cnt - 1.0)), 1e-300);
            const double w = 1.0 / se2;
            sxx += w * mx * mx;
            sxy += w * mx * my;
            ++used;
        }
        fit.n_bins = used;
        if (sxx <= 0.0) throw NumericError("empirical_qv_drift: degenerate predictor");
        fit.slope = sxy / sxx;
        fit.slope_se = std::sqrt(1.0 / sxx);
        return fit;
    };

    QvDriftResult res;
    res.diffusion = binned_fit(qv_obs);
    res.drift = binned_fit(drift_obs);
    return res;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    if (x.size() > 2) fit.slope_se = std::sqrt(ss / (n - 2.0) * n / denom);
    return fit;
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw ValidationError("percentile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(q, 0.0, 1.0) * (static_cast<double>(v.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace aclab
