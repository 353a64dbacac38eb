#include "gdens/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdens/stats.hpp"

namespace gdens {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();
const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);

} // namespace

ClassicBounds classic_bounds(double sigma_max_sq, double z) {
    if (!(sigma_max_sq > 0.0)) throw DomainError("classic_bounds: sigma_max^2 must be positive");
    if (!(z > 0.0)) throw DomainError("classic_bounds: z must be positive");
    ClassicBounds b;
    b.right = std::exp(-z * z / (2.0 * sigma_max_sq));
    b.left = b.right;
    b.both = 2.0 * b.right;
    return b;
}

double comparison_right_lower(double mu, double sigma_max_sq, double z) {
    if (!(sigma_max_sq > 0.0))
        throw DomainError("comparison_right_lower: sigma_max^2 must be positive");
    const double t = mu + z;
    if (!(t > 0.0)) throw DomainError("comparison_right_lower: mu + z must be positive");
    const double s = std::sqrt(sigma_max_sq);
    return inv_sqrt_2pi * s * t / (sigma_max_sq + t * t) * std::exp(-t * t / (2.0 * sigma_max_sq));
}

double comparison_left_upper(double mu, double min_diag, double z) {
    if (!(min_diag > 0.0)) throw DomainError("comparison_left_upper: min_diag must be positive");
    if (!(z > mu)) throw DomainError("comparison_left_upper: requires z > mu");
    const double t = z - mu;
    return std::sqrt(min_diag) / (std::sqrt(2.0 * M_PI) * t) *
           std::exp(-t * t / (2.0 * min_diag));
}

ComparisonBounds comparison_bounds(double mu, double sigma_max_sq, double min_diag, double z) {
    ComparisonBounds b;
    b.right_lower = comparison_right_lower(mu, sigma_max_sq, z);
    b.left_upper = comparison_left_upper(mu, min_diag, z);
    return b;
}

EnvelopeTails integrated_envelope_tails(double sigma_min_sq, double sigma_max_sq,
                                        double abs_mean, double z) {
    if (!(sigma_min_sq > 0.0) || !(sigma_max_sq >= sigma_min_sq))
        throw DomainError("integrated_envelope_tails: need 0 < sigma_min^2 <= sigma_max^2");
    if (!(abs_mean > 0.0) || !(z > 0.0))
        throw DomainError("integrated_envelope_tails: abs_mean and z must be positive");
    EnvelopeTails t;
    t.lower = abs_mean * sigma_min_sq / (2.0 * sigma_max_sq) * z / (sigma_min_sq + z * z) *
              std::exp(-z * z / (2.0 * sigma_min_sq));
    t.upper = abs_mean * sigma_max_sq / (2.0 * sigma_min_sq) / z *
              std::exp(-z * z / (2.0 * sigma_max_sq));
    t.upper = std::min(1.0, t.upper);
    return t;
}

double concentration_upper(double alpha, double beta, double z) {
    if (alpha < 0.0 || !(beta > 0.0))
        throw DomainError("concentration_upper: need alpha >= 0 and beta > 0");
    if (!(z > 0.0)) throw DomainError("concentration_upper: z must be positive");
    return std::exp(-z * z / (2.0 * alpha * z + 2.0 * beta));
}

QuadraticParams fbm_quadratic_params(double hurst, double horizon) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("fbm_quadratic_params: hurst must be in (0,1)");
    if (!(horizon > 0.0)) throw DomainError("fbm_quadratic_params: horizon must be positive");
    const double ch = hurst + 0.5;
    QuadraticParams p;
    p.alpha = std::pow(horizon, 2.0 * hurst + 1.0) / ch;
    p.beta = std::pow(horizon, 4.0 * hurst + 2.0) / (2.0 * ch * ch);
    p.mu_q = std::pow(horizon, 2.0 * hurst + 1.0) / (2.0 * hurst + 1.0);
    p.sigma_q_sq = std::pow(horizon, 2.0 * hurst + 2.0) / (2.0 * hurst + 2.0);
    return p;
}

double fbm_quadratic_lower(double hurst, double horizon, double z) {
    if (!(z > 0.0)) throw DomainError("fbm_quadratic_lower: z must be positive");
    const QuadraticParams unit = fbm_quadratic_params(hurst, 1.0);
    // Self-similarity: Z_T has the law of T^{2H+1} Z_1.
    const double z1 = z / std::pow(horizon, 2.0 * hurst + 1.0);
    const double mu = unit.mu_q;
    const double s2 = unit.sigma_q_sq;
    const double t = z1 + mu;
    return std::sqrt(s2) * std::sqrt(t) / (s2 + t) * std::exp(-t / (2.0 * s2));
}

double decay_lower(double sigma_min_sq, double abs_mean, double beta_exp, double alpha_thr,
                   double z) {
    if (!(sigma_min_sq > 0.0)) throw DomainError("decay_lower: sigma_min^2 must be positive");
    if (!(abs_mean > 0.0)) throw DomainError("decay_lower: abs_mean must be positive");
    if (!(beta_exp > 1.0)) throw DomainError("decay_lower: beta_exp must exceed 1");
    if (!(z >= alpha_thr)) throw DomainError("decay_lower: z is below the threshold");
    if (!(z > 0.0)) throw DomainError("decay_lower: z must be positive");
    return 0.5 * (1.0 - 1.0 / beta_exp) * abs_mean / z *
           std::exp(-z * z / (2.0 * sigma_min_sq));
}

HMonotonicityCheck h_monotonicity_check(const DensityEstimate& density, double beta_exp,
                                        double alpha_thr) {
    if (!(beta_exp > 1.0)) throw DomainError("h_monotonicity_check: beta_exp must exceed 1");
    if (!(alpha_thr > 0.0)) throw DomainError("h_monotonicity_check: alpha_thr must be positive");
    if (!(alpha_thr < density.grid[density.run_end - 1]))
        throw DomainError("h_monotonicity_check: threshold is beyond the usable grid");
    HMonotonicityCheck c;
    const double p = 1.0 + beta_exp;
    std::size_t prev = 0;
    bool have_prev = false;
    double h_prev = 0.0;
    for (std::size_t j = density.run_begin; j < density.run_end; ++j) {
        if (density.flagged[j] || density.grid[j] < alpha_thr) continue;
        const double h = std::pow(density.grid[j], p) * density.rho[j];
        if (have_prev) {
            ++c.checked;
            const double tol =
                2.0 * std::hypot(density.rel_se[prev], density.rel_se[j]);
            if (h > h_prev * (1.0 + tol)) c.violations.push_back(prev);
        }
        h_prev = h;
        prev = j;
        have_prev = true;
    }
    c.pass = c.checked > 0 && c.violations.empty();
    return c;
}

GfunTailLower gfun_tail_lower(const GEstimate& g, double sigma_min_sq, double abs_mean,
                              double z) {
    if (!(sigma_min_sq > 0.0)) throw DomainError("gfun_tail_lower: sigma_min^2 must be positive");
    if (!(abs_mean > 0.0)) throw DomainError("gfun_tail_lower: abs_mean must be positive");
    if (!(z > 0.0)) throw DomainError("gfun_tail_lower: z must be positive");
    if (!(z >= g.grid.front() && z <= g.grid.back()))
        throw DomainError("gfun_tail_lower: z must lie inside the regression grid");
    const double s2 = sigma_min_sq;
    const double s = std::sqrt(s2);
    auto weight = [&](double y) { return std::exp(-y * y / (2.0 * s2)); };

    // Quadrature of weight * ghat from z to the last unflagged grid point at
    // or beyond z, then a closed-form tail with ghat frozen at its end value.
    std::size_t j = 0;
    while (j < g.grid.size() && g.grid[j] < z) ++j;
    double integral = 0.0;
    double prev_y = z;
    double prev_f = weight(z) * g.ghat_at(z);
    double g_end = g.ghat_at(z);
    for (; j < g.grid.size(); ++j) {
        if (g.flagged[j]) break;
        const double y = g.grid[j];
        const double f = weight(y) * g.ghat[j];
        integral += 0.5 * (y - prev_y) * (prev_f + f);
        prev_y = y;
        prev_f = f;
        g_end = g.ghat[j];
    }
    const double y_end = prev_y;
    // int_a^inf exp(-y^2/(2 s^2)) dy = s * sqrt(pi/2) * erfc(a / (s sqrt(2)))
    const double tail_mass =
        g_end * s * std::sqrt(M_PI / 2.0) * std::erfc(y_end / (s * std::sqrt(2.0)));
    const double denom = integral + tail_mass;
    if (!(denom > 0.0)) throw DomainError("gfun_tail_lower: non-positive denominator");
    const double num = 0.5 * abs_mean * s2 * s2 * z * z /
                       ((s2 + z * z) * (s2 + z * z)) * std::exp(-z * z / s2);
    GfunTailLower out;
    out.value = num / denom;
    out.extrapolated_share = tail_mass / denom;
    return out;
}

namespace {

void append_status(TailColumn& col, double empirical, double lo, double hi, double value) {
    if (std::isnan(value)) {
        col.status.push_back(static_cast<std::uint8_t>(CheckStatus::Pass));
        return;
    }
    CheckStatus st = CheckStatus::Pass;
    if (col.is_upper) {
        if (empirical > value) st = lo > value ? CheckStatus::Hard : CheckStatus::Soft;
    } else {
        if (empirical < value) st = hi < value ? CheckStatus::Hard : CheckStatus::Soft;
    }
    if (st == CheckStatus::Soft) ++col.soft;
    if (st == CheckStatus::Hard) ++col.hard;
    col.status.push_back(static_cast<std::uint8_t>(st));
}

} // namespace

TailReport build_tail_report(const GSamples& samples, const std::vector<double>& grid,
                             const TailBoundParams& params, const GEstimate* g,
                             const DensityEstimate* density) {
    TailReport rep;
    for (double z : grid)
        if (z > 0.0) rep.z.push_back(z);
    if (rep.z.empty()) throw DomainError("build_tail_report: grid has no positive points");

    std::vector<double> sorted(samples.z);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t m = rep.z.size();

    for (std::size_t j = 0; j < m; ++j) {
        const double z = rep.z[j];
        const std::size_t right = n - static_cast<std::size_t>(std::lower_bound(
                                          sorted.begin(), sorted.end(), z) -
                                      sorted.begin());
        const std::size_t left = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), -z) - sorted.begin());
        const WilsonInterval wr = wilson95(right, n);
        const WilsonInterval wl = wilson95(left, n);
        const WilsonInterval wb = wilson95(right + left, n);
        rep.emp_right.push_back(wr.p_hat);
        rep.right_lo.push_back(wr.lo);
        rep.right_hi.push_back(wr.hi);
        rep.emp_left.push_back(wl.p_hat);
        rep.left_lo.push_back(wl.lo);
        rep.left_hi.push_back(wl.hi);
        rep.emp_both.push_back(wb.p_hat);
        rep.both_lo.push_back(wb.lo);
        rep.both_hi.push_back(wb.hi);
    }

    auto clip = [&](double v) {
        if (v > 1.0) {
            ++rep.clip_events;
            return 1.0;
        }
        return v;
    };
    auto add_column = [&](const std::string& name, bool is_upper, int side, auto&& fn) {
        TailColumn col;
        col.name = name;
        col.is_upper = is_upper;
        col.side = side;
        col.value.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            double v = fn(rep.z[j]);
            if (!std::isnan(v)) v = clip(v);
            col.value.push_back(v);
            if (side > 0)
                append_status(col, rep.emp_right[j], rep.right_lo[j], rep.right_hi[j], v);
            else if (side < 0)
                append_status(col, rep.emp_left[j], rep.left_lo[j], rep.left_hi[j], v);
            else
                append_status(col, rep.emp_both[j], rep.both_lo[j], rep.both_hi[j], v);
        }
        rep.soft_total += col.soft;
        rep.hard_total += col.hard;
        rep.columns.push_back(std::move(col));
    };

    if (params.sigma_max_sq > 0.0) {
        add_column("classic_right_upper", true, +1,
                   [&](double z) { return classic_bounds(params.sigma_max_sq, z).right; });
        add_column("classic_left_upper", true, -1,
                   [&](double z) { return classic_bounds(params.sigma_max_sq, z).left; });
        add_column("classic_both_upper", true, 0,
                   [&](double z) { return classic_bounds(params.sigma_max_sq, z).both; });
    }

    if (params.comparison_valid && params.sigma_max_sq > 0.0 && params.min_diag > 0.0) {
        add_column("comparison_right_lower", false, +1, [&](double z) {
            return params.mu_raw + z > 0.0
                       ? comparison_right_lower(params.mu_raw, params.sigma_max_sq, z)
                       : nan_value;
        });
        add_column("comparison_left_upper", true, -1, [&](double z) {
            return z > params.mu_raw ? comparison_left_upper(params.mu_raw, params.min_diag, z)
                                     : nan_value;
        });
    }

    if (params.have_envelope && params.abs_mean > 0.0) {
        add_column("envelope_right_lower", false, +1, [&](double z) {
            return integrated_envelope_tails(params.sigma_min_sq, params.sigma_max_sq,
                                             params.abs_mean, z)
                .lower;
        });
        add_column("envelope_right_upper", true, +1, [&](double z) {
            return integrated_envelope_tails(params.sigma_min_sq, params.sigma_max_sq,
                                             params.abs_mean, z)
                .upper;
        });
    }

    if (params.have_linear_g) {
        // Empirical check of the hypothesis g(Z) <= alpha Z + beta on the
        // integrand draws; the column is reported but marked unverified if
        // more than 0.1% of draws break the line.
        const double scale = std::max(1.0, params.beta);
        std::size_t bad = 0;
        for (std::size_t i = 0; i < samples.z.size(); ++i)
            if (samples.v[i] > params.alpha * samples.z[i] + params.beta + 1e-9 * scale) ++bad;
        rep.hyp_violation_frac = static_cast<double>(bad) / static_cast<double>(n);
        rep.hyp_ok = rep.hyp_violation_frac <= 1e-3;
        add_column("concentration_right_upper", true, +1, [&](double z) {
            return concentration_upper(params.alpha, params.beta, z);
        });
    }

    if (params.is_quadratic) {
        add_column("quadratic_right_lower", false, +1, [&](double z) {
            return fbm_quadratic_lower(params.hurst, params.horizon, z);
        });
    }

    if (params.have_envelope && params.abs_mean > 0.0 && density != nullptr &&
        params.alpha_thr > 0.0 && params.alpha_thr < density->grid[density->run_end - 1]) {
        const HMonotonicityCheck hc =
            h_monotonicity_check(*density, params.beta_exp, params.alpha_thr);
        rep.h_check_pass = hc.pass;
        rep.h_violations = hc.violations.size();
        rep.alpha_thr_used = params.alpha_thr;
        if (hc.pass) {
            add_column("decay_right_lower", false, +1, [&](double z) {
                return z >= params.alpha_thr
                           ? decay_lower(params.sigma_min_sq, params.abs_mean, params.beta_exp,
                                         params.alpha_thr, z)
                           : nan_value;
            });
        }
    }

    if (params.have_envelope && params.abs_mean > 0.0 && g != nullptr) {
        add_column("gfun_right_lower", false, +1, [&](double z) {
            if (z < g->grid.front() || z > g->grid.back()) return nan_value;
            return gfun_tail_lower(*g, params.sigma_min_sq, params.abs_mean, z).value;
        });
    }

    return rep;
}

} // namespace gdens
