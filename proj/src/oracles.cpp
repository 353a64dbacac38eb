#include "gdens/oracles.hpp"

#include <cmath>

#include "gdens/stats.hpp"

namespace gdens {

double GaussianOracle::density(double z) const {
    const double s = std::sqrt(sigma_sq);
    return norm_pdf(z / s) / s;
}

double GaussianOracle::g(double) const { return sigma_sq; }

double GaussianOracle::upper_moment(double z) const {
    // int_z^inf y rho(y) dy = sigma^2 rho(z) for a centered Gaussian.
    return sigma_sq * density(z);
}

double GaussianOracle::right_tail(double z) const { return norm_tail(z / std::sqrt(sigma_sq)); }

double GaussianOracle::abs_mean() const { return std::sqrt(2.0 * sigma_sq / M_PI); }

double MaxTwoOracle::mean_raw() const { return std::sqrt((1.0 - corr) / M_PI); }

double MaxTwoOracle::density_raw(double t) const {
    if (corr >= 1.0) throw DomainError("max oracle: corr must be < 1");
    const double lambda = std::sqrt((1.0 - corr) / (1.0 + corr));
    return 2.0 * norm_pdf(t) * norm_cdf(lambda * t);
}

double MaxTwoOracle::density(double z) const { return density_raw(z + mean_raw()); }

namespace {

// Composite Simpson on [a, b].
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i)
        s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

double MaxTwoOracle::right_tail(double z) const {
    const double t = z + mean_raw();
    if (corr == 0.0) {
        const double c = norm_cdf(t);
        return 1.0 - c * c;
    }
    // Quadrature of the density out to where the classic bound is ~1e-18.
    const double hi = std::max(t + 1.0, 10.0);
    return simpson([&](double y) { return density_raw(y); }, t, hi, 4096) +
           2.0 * norm_tail(hi); // P(max >= hi) <= 2 P(N >= hi)
}

double MaxTwoOracle::upper_moment(double z) const {
    const double mu = mean_raw();
    const double t = z + mu;
    if (corr == 0.0) {
        // int_t^inf y 2 phi(y) Phi(y) dy = 2 phi(t) Phi(t) + erfc(t)/(2 sqrt(pi))
        const double raw = 2.0 * norm_pdf(t) * norm_cdf(t) + std::erfc(t) / (2.0 * std::sqrt(M_PI));
        const double tail = 1.0 - norm_cdf(t) * norm_cdf(t);
        return raw - mu * tail;
    }
    const double hi = std::max(t + 1.0, 10.0);
    return simpson([&](double y) { return (y - mu) * density_raw(y); }, t, hi, 4096);
}

double MaxTwoOracle::g(double z) const { return upper_moment(z) / density(z); }

double MaxTwoOracle::abs_mean() const { return 2.0 * upper_moment(0.0); }

} // namespace gdens
