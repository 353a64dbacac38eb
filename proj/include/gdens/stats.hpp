#pragma once

#include <cstddef>
#include <vector>

namespace gdens {

struct MomentSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double var = 0.0;      // unbiased
    double mean_se = 0.0;  // sqrt(var / n)
    double var_se = 0.0;   // sqrt((m4 - m2^2) / n)
};

MomentSummary moments(const std::vector<double>& x);

// Type-7 (linear interpolation) quantile of already sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Convenience: copies, sorts, interpolates.
double quantile(std::vector<double> x, double p);

// 95% Wilson score interval for k successes out of n.
struct WilsonInterval {
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
WilsonInterval wilson95(std::size_t k, std::size_t n);

// Silverman's rule-of-thumb bandwidth 1.06 * sd * n^{-1/5}.
double silverman_bandwidth(double sd, std::size_t n);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Standard normal pdf / upper tail / quantile.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_tail(double x);     // P(N > x)
double norm_quantile(double p); // inverse CDF

// Evenly spaced grid of `points` values covering [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t points);

} // namespace gdens
