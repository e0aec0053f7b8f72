#ifndef LEVYMA_STATS_HPP
#define LEVYMA_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"

namespace levyma {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov distribution tail: P(sup |B(t)| > x) for the Brownian bridge.
inline double kolmogorov_sf(double x) {
    if (x < 1e-8) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * double(k) * double(k) * x * x);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, s));
}

struct KsResult {
    double statistic = 0.0;  // sup-distance
    double p_value = 0.0;
};

// One-sample KS test against the standard normal.
inline KsResult ks_test_normal(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    std::size_t n = x.size();
    if (n == 0) throw domain_error("ks_test_normal: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = normal_cdf(x[i]);
        d = std::max(d, std::abs(f - double(i) / double(n)));
        d = std::max(d, std::abs(double(i + 1) / double(n) - f));
    }
    KsResult out;
    out.statistic = d;
    out.p_value = kolmogorov_sf(std::sqrt(double(n)) * d);
    return out;
}

// Two-sample KS sup-distance (no p-value needed by callers).
inline double ks_two_sample_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.empty() || b.empty()) throw domain_error("ks_two_sample_distance: empty sample");
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        double fa = double(i) / double(a.size());
        double fb = double(j) / double(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

struct AdResult {
    double statistic = 0.0;  // A^2
    double p_value = 0.0;
};

// Anderson-Darling test against the standard normal (known parameters);
// p-value via the Marsaglia-Marsaglia approximation of the A^2 limit law.
inline AdResult ad_test_normal(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    std::size_t n = x.size();
    if (n == 0) throw domain_error("ad_test_normal: empty sample");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = normal_cdf(x[i]);
        f = std::min(1.0 - 1e-15, std::max(1e-15, f));
        double fr = normal_cdf(x[n - 1 - i]);
        fr = std::min(1.0 - 1e-15, std::max(1e-15, fr));
        s += (2.0 * double(i) + 1.0) * (std::log(f) + std::log(1.0 - fr));
    }
    AdResult out;
    out.statistic = -double(n) - s / double(n);
    double z = out.statistic;
    double p;
    if (z < 0.2)
        p = 1.0 - std::exp(-13.436 + 101.14 * z - 223.73 * z * z);
    else if (z < 0.34)
        p = 1.0 - std::exp(-8.318 + 42.796 * z - 59.938 * z * z);
    else if (z < 0.6)
        p = std::exp(0.9177 - 4.279 * z - 1.38 * z * z);
    else
        p = std::exp(1.2937 - 5.709 * z + 0.0186 * z * z);
    out.p_value = std::min(1.0, std::max(0.0, p));
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double slope_ci_lo = 0.0;  // ~95% band
    double slope_ci_hi = 0.0;
    double r_squared = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n != y.size() || n < 2) throw domain_error("linear_fit: need >= 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw domain_error("linear_fit: degenerate abscissae");
    LinearFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double sse = syy - out.slope * sxy;
    out.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (n > 2) {
        double var = std::max(0.0, sse) / double(n - 2);
        out.slope_stderr = std::sqrt(var / sxx);
    }
    out.slope_ci_lo = out.slope - 1.96 * out.slope_stderr;
    out.slope_ci_hi = out.slope + 1.96 * out.slope_stderr;
    return out;
}

// Fit log y = slope * log x + c.
inline LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw domain_error("loglog_fit: inputs must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly);
}

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

inline double variance(const std::vector<double>& x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size() > 1 ? x.size() - 1 : 1);
}

}  // namespace levyma

#endif
