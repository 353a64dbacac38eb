#pragma once

#include <cstdint>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/g_estimator.hpp"

namespace gdens {

// Density reconstructed from the regressed conditional variance:
// rho(z) = E|Z| / (2 g(z)) * exp(-int_0^z x / g(x) dx), evaluated on the
// maximal unflagged contiguous grid run containing 0.
struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> rho;           // NaN outside the usable run
    std::vector<double> rel_se;        // approximate relative stderr of rho
    std::vector<std::uint8_t> flagged; // flagged g point or outside the run
    double abs_mean = 0.0;
    double mass = 0.0; // trapezoid mass over the usable run
    double mean = 0.0; // trapezoid first moment over the usable run
    std::size_t run_begin = 0, run_end = 0; // usable run [begin, end)
};

DensityEstimate density_from_g(const GEstimate& g, double abs_mean, double abs_mean_se);

// Two-sided Gaussian envelope from conditional-variance bounds:
// lower(z) = absMean / (2 sigma_max^2) exp(-z^2 / (2 sigma_min^2)),
// upper(z) = absMean / (2 sigma_min^2) exp(-z^2 / (2 sigma_max^2)).
struct Envelope {
    std::vector<double> grid;
    std::vector<double> lower;
    std::vector<double> upper;
    double sigma_min_sq = 0.0;
    double sigma_max_sq = 0.0;
    double abs_mean = 0.0;
};

Envelope gaussian_envelope(const std::vector<double>& grid, double sigma_min_sq,
                           double sigma_max_sq, double abs_mean);

// Distance-to-Gaussian diagnostic: varG = Var(ghat(Z)) debiased by the
// regression noise, and the induced total-variation bound sqrt(varG)/varZ.
struct NormalityDiagnostic {
    double var_g = 0.0;
    double var_g_se = 0.0;
    double stein_gap_bound = 0.0;
    bool gauss_flag = false; // varG indistinguishable from 0
};

NormalityDiagnostic normality_diagnostic(const GSamples& samples, const GEstimate& g,
                                         double var_z);

// Empirical upper partial moment phi_hat(z) = (1/n) sum Z_i 1{Z_i >= z}.
std::vector<double> empirical_upper_moment(std::vector<double> z_samples,
                                           const std::vector<double>& grid);
double empirical_upper_moment_at(const std::vector<double>& z_samples, double z);

// Residual of the exact identity g(z) rho(z) = phi(z) on the usable run.
struct IdentityResidual {
    std::vector<double> residual; // NaN outside the run
    double sup_abs = 0.0;
    double phi0 = 0.0;    // phi_hat(0)
    double rel_sup = 0.0; // sup_abs / phi0
};

IdentityResidual key_identity_residual(const GSamples& samples, const GEstimate& g,
                                       const DensityEstimate& density);

} // namespace gdens
