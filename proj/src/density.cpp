#include "gdens/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdens/stats.hpp"

namespace gdens {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

} // namespace

DensityEstimate density_from_g(const GEstimate& g, double abs_mean, double abs_mean_se) {
    const std::size_t m = g.grid.size();
    if (m < 3) throw DomainError("density_from_g: grid too small");
    if (!(abs_mean > 0.0)) throw DomainError("density_from_g: abs_mean must be positive");
    if (!(g.grid.front() < 0.0 && g.grid.back() > 0.0))
        throw DomainError("density_from_g: grid must contain 0 strictly inside");

    // j0 = last node with z <= 0; the integral is anchored exactly at 0,
    // with a virtual node there when 0 falls between grid points.
    std::size_t j0 = 0;
    while (j0 + 1 < m && g.grid[j0 + 1] <= 0.0) ++j0;
    if (g.flagged[j0] || g.flagged[j0 + 1])
        throw DomainError("density_from_g: grid cell around 0 is flagged");

    // Maximal unflagged contiguous run containing the 0 cell.
    std::size_t run_begin = j0;
    while (run_begin > 0 && !g.flagged[run_begin - 1]) --run_begin;
    std::size_t run_end = j0 + 2;
    while (run_end < m && !g.flagged[run_end]) ++run_end;

    DensityEstimate d;
    d.grid = g.grid;
    d.rho.assign(m, nan_value);
    d.rel_se.assign(m, nan_value);
    d.flagged.assign(m, 1);
    d.abs_mean = abs_mean;
    d.run_begin = run_begin;
    d.run_end = run_end;

    // Cumulative trapezoid of s(x) = x / ghat(x) outward from 0 (exact for
    // constant ghat because the integrand is then linear).
    std::vector<double> integral(m, 0.0);
    auto s_at = [&](std::size_t j) { return g.grid[j] / g.ghat[j]; };
    if (g.grid[j0] == 0.0) {
        integral[j0] = 0.0;
    } else {
        // Virtual node at 0: s(0) = 0 regardless of ghat(0).
        integral[j0] = 0.5 * g.grid[j0] * s_at(j0);         // -(0 - z_j0)/2 * (s + 0)
        integral[j0 + 1] = 0.5 * g.grid[j0 + 1] * s_at(j0 + 1);
    }
    if (g.grid[j0] == 0.0 && j0 + 1 < run_end)
        integral[j0 + 1] =
            integral[j0] + 0.5 * (g.grid[j0 + 1] - g.grid[j0]) * (s_at(j0) + s_at(j0 + 1));
    for (std::size_t j = j0 + 1; j + 1 < run_end; ++j)
        integral[j + 1] = integral[j] + 0.5 * (g.grid[j + 1] - g.grid[j]) * (s_at(j) + s_at(j + 1));
    for (std::size_t j = j0; j > run_begin; --j)
        integral[j - 1] = integral[j] - 0.5 * (g.grid[j] - g.grid[j - 1]) * (s_at(j) + s_at(j - 1));

    const double rel_mu = abs_mean_se / abs_mean;
    for (std::size_t j = run_begin; j < run_end; ++j) {
        d.rho[j] = abs_mean / (2.0 * g.ghat[j]) * std::exp(-integral[j]);
        const double rel_g = g.se[j] / g.ghat[j];
        d.rel_se[j] = std::sqrt(rel_g * rel_g + rel_mu * rel_mu);
        d.flagged[j] = 0;
    }

    for (std::size_t j = run_begin; j + 1 < run_end; ++j) {
        const double dz = d.grid[j + 1] - d.grid[j];
        d.mass += 0.5 * dz * (d.rho[j] + d.rho[j + 1]);
        d.mean += 0.5 * dz * (d.grid[j] * d.rho[j] + d.grid[j + 1] * d.rho[j + 1]);
    }
    return d;
}

Envelope gaussian_envelope(const std::vector<double>& grid, double sigma_min_sq,
                           double sigma_max_sq, double abs_mean) {
    if (!(sigma_min_sq > 0.0))
        throw DegenerateEnvelope("gaussian_envelope: sigma_min^2 must be positive");
    if (!(sigma_max_sq >= sigma_min_sq))
        throw DomainError("gaussian_envelope: sigma_max^2 must be >= sigma_min^2");
    if (!(abs_mean > 0.0)) throw DomainError("gaussian_envelope: abs_mean must be positive");
    Envelope e;
    e.grid = grid;
    e.sigma_min_sq = sigma_min_sq;
    e.sigma_max_sq = sigma_max_sq;
    e.abs_mean = abs_mean;
    e.lower.resize(grid.size());
    e.upper.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double z2 = grid[j] * grid[j];
        e.lower[j] = abs_mean / (2.0 * sigma_max_sq) * std::exp(-z2 / (2.0 * sigma_min_sq));
        e.upper[j] = abs_mean / (2.0 * sigma_min_sq) * std::exp(-z2 / (2.0 * sigma_max_sq));
    }
    return e;
}

NormalityDiagnostic normality_diagnostic(const GSamples& samples, const GEstimate& g,
                                         double var_z) {
    if (!(var_z > 0.0)) throw DomainError("normality_diagnostic: var_z must be positive");
    const std::size_t n = samples.z.size();
    if (n < 2) throw DomainError("normality_diagnostic: need at least 2 samples");
    std::vector<double> gz(n), sez(n);
    for (std::size_t i = 0; i < n; ++i) {
        gz[i] = g.ghat_at(samples.z[i]);
        sez[i] = g.se_at(samples.z[i]);
    }
    const MomentSummary mg = moments(gz);
    double noise = 0.0;
    for (double s : sez) noise += s * s;
    noise /= static_cast<double>(n);
    NormalityDiagnostic d;
    d.var_g = std::max(0.0, mg.var - noise);
    // The noise correction is itself uncertain; fold it into the stderr so
    // the flag tolerates the debiasing.
    d.var_g_se = mg.var_se + noise;
    d.stein_gap_bound = std::sqrt(d.var_g) / var_z;
    d.gauss_flag = d.var_g <= 3.0 * d.var_g_se + 1e-12 * var_z * var_z;
    return d;
}

std::vector<double> empirical_upper_moment(std::vector<double> z_samples,
                                           const std::vector<double>& grid) {
    if (z_samples.empty()) throw DomainError("empirical_upper_moment: empty sample");
    std::sort(z_samples.begin(), z_samples.end());
    const std::size_t n = z_samples.size();
    // suffix[i] = sum of samples[i..n)
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i > 0; --i) suffix[i - 1] = suffix[i] + z_samples[i - 1];
    std::vector<double> phi(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const std::size_t i = static_cast<std::size_t>(
            std::lower_bound(z_samples.begin(), z_samples.end(), grid[j]) - z_samples.begin());
        phi[j] = suffix[i] / static_cast<double>(n);
    }
    return phi;
}

double empirical_upper_moment_at(const std::vector<double>& z_samples, double z) {
    if (z_samples.empty()) throw DomainError("empirical_upper_moment: empty sample");
    double s = 0.0;
    for (double x : z_samples)
        if (x >= z) s += x;
    return s / static_cast<double>(z_samples.size());
}

IdentityResidual key_identity_residual(const GSamples& samples, const GEstimate& g,
                                       const DensityEstimate& density) {
    IdentityResidual r;
    const std::vector<double> phi = empirical_upper_moment(samples.z, density.grid);
    r.residual.assign(density.grid.size(), nan_value);
    for (std::size_t j = density.run_begin; j < density.run_end; ++j) {
        r.residual[j] = g.ghat[j] * density.rho[j] - phi[j];
        r.sup_abs = std::max(r.sup_abs, std::abs(r.residual[j]));
    }
    r.phi0 = empirical_upper_moment_at(samples.z, 0.0);
    if (!(r.phi0 > 0.0)) throw DomainError("key_identity_residual: phi_hat(0) is not positive");
    r.rel_sup = r.sup_abs / r.phi0;
    return r;
}

} // namespace gdens
