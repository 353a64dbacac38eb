#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/density.hpp"
#include "gdens/g_estimator.hpp"

namespace gdens {

// Gaussian-type concentration bounds P(Z >= z), P(Z <= -z) <= value and
// P(|Z| >= z) <= twice it; raw values, clipping to 1 happens at report
// assembly where the events are counted.
struct ClassicBounds {
    double right = 0.0;
    double left = 0.0;
    double both = 0.0;
};
ClassicBounds classic_bounds(double sigma_max_sq, double z);

// Max-type comparison bounds for a centered max Z = M - mu with component
// variances <= sigma_max^2 and >= min_diag:
//   right_lower <= P(Z >= z)  (classical lower tail estimate at mu + z),
//   left_upper  >= P(Z <= -z) (upper estimate at z - mu, needs z > mu).
struct ComparisonBounds {
    double right_lower = 0.0;
    double left_upper = 0.0;
};
double comparison_right_lower(double mu, double sigma_max_sq, double z);
double comparison_left_upper(double mu, double min_diag, double z);
ComparisonBounds comparison_bounds(double mu, double sigma_max_sq, double min_diag, double z);

// Integrated envelope tails: lower/upper bounds for P(Z >= z), z > 0, from
// the two-sided density envelope; upper is clipped at 1.
struct EnvelopeTails {
    double lower = 0.0;
    double upper = 0.0;
};
EnvelopeTails integrated_envelope_tails(double sigma_min_sq, double sigma_max_sq,
                                        double abs_mean, double z);

// exp(-z^2 / (2 alpha z + 2 beta)) under g(Z) <= alpha Z + beta.
double concentration_upper(double alpha, double beta, double z);

// Constants of the quadratic fBm functional Z = int_0^T B^2 - mu_q:
// conditional-variance line g(Z) <= alpha Z + beta and the mean/variance of
// the comparison variable int_0^T B.
struct QuadraticParams {
    double alpha = 0.0;
    double beta = 0.0;
    double mu_q = 0.0;
    double sigma_q_sq = 0.0;
};
QuadraticParams fbm_quadratic_params(double hurst, double horizon);

// Lower tail bound for the quadratic functional, evaluated in horizon-1
// units and rescaled by the self-similarity law Z_T ~ T^{2H+1} Z_1.
double fbm_quadratic_lower(double hurst, double horizon, double z);

// Lower bound (1/2)(1 - 1/beta_exp) E|Z| z^{-1} exp(-z^2 / (2 sigma_min^2))
// valid for z >= alpha_thr when x^{1+beta_exp} rho(x) is decreasing there.
double decay_lower(double sigma_min_sq, double abs_mean, double beta_exp, double alpha_thr,
                   double z);

// Checks that h(x) = x^{1+beta_exp} rho(x) is nonincreasing over unflagged
// grid points >= alpha_thr, with tolerance from the density's stderr.
struct HMonotonicityCheck {
    std::size_t checked = 0;
    std::vector<std::size_t> violations; // left index of each offending pair
    bool pass = false;
};
HMonotonicityCheck h_monotonicity_check(const DensityEstimate& density, double beta_exp,
                                        double alpha_thr);

// General regression-based lower bound for P(Z >= z): a closed-form
// numerator over the quadrature of exp(-y^2/(2 sigma_min^2)) ghat(y) from z
// to the grid end, with ghat held constant beyond it.
struct GfunTailLower {
    double value = 0.0;
    double extrapolated_share = 0.0; // share of the denominator beyond the grid
};
GfunTailLower gfun_tail_lower(const GEstimate& g, double sigma_min_sq, double abs_mean,
                              double z);

// ----- assembled per-grid-point report ---------------------------------

struct TailBoundParams {
    double sigma_min_sq = 0.0, sigma_max_sq = 0.0;
    bool have_envelope = false;
    double abs_mean = 0.0;
    double mu_raw = 0.0;   // mean of the uncentered functional
    double min_diag = 0.0; // smallest marginal variance
    bool comparison_valid = false; // max-type functional
    double alpha = 0.0, beta = 0.0;
    bool have_linear_g = false;
    double beta_exp = 2.0;
    double alpha_thr = 0.0; // must be resolved (> 0) by the caller
    bool is_quadratic = false;
    double hurst = 0.0, horizon = 0.0;
};

enum class CheckStatus { Pass, Soft, Hard };

struct TailColumn {
    std::string name;
    bool is_upper = false;        // upper or lower bound
    int side = +1;                // +1 right tail, -1 left tail, 0 both
    std::vector<double> value;    // NaN where the bound does not apply
    std::vector<std::uint8_t> status; // CheckStatus per point (Pass where NaN)
    std::size_t soft = 0, hard = 0;
};

struct TailReport {
    std::vector<double> z; // strictly positive grid points
    std::vector<double> emp_right, right_lo, right_hi;
    std::vector<double> emp_left, left_lo, left_hi;
    std::vector<double> emp_both, both_lo, both_hi;
    std::vector<TailColumn> columns;
    std::size_t clip_events = 0;
    double hyp_violation_frac = 0.0;
    bool hyp_ok = true;
    bool h_check_pass = false;
    std::size_t h_violations = 0;
    double alpha_thr_used = 0.0;
    std::size_t soft_total = 0, hard_total = 0;
};

// grid: the experiment grid; only its strictly positive points are used.
// g / density may be null (the dependent columns are skipped).
TailReport build_tail_report(const GSamples& samples, const std::vector<double>& grid,
                             const TailBoundParams& params, const GEstimate* g,
                             const DensityEstimate* density);

} // namespace gdens
