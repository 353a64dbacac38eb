#include "gdens/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gdens/csv.hpp"
#include "gdens/parallel.hpp"

namespace gdens {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

const char* status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Soft:
        return "soft";
    case CheckStatus::Hard:
        return "hard";
    }
    return "?";
}

} // namespace

KdeCurve kde_density(const std::vector<double>& samples, const std::vector<double>& grid,
                     double bandwidth, Exec exec) {
    const std::size_t n = samples.size();
    if (n < 2) throw DomainError("kde_density: need at least 2 samples");
    KdeCurve k;
    k.grid = grid;
    k.count = n;
    if (bandwidth == 0.0) {
        const MomentSummary m = moments(samples);
        k.bandwidth = silverman_bandwidth(std::sqrt(m.var), n);
    } else if (bandwidth > 0.0) {
        k.bandwidth = bandwidth;
    } else {
        throw DomainError("kde_density: bandwidth must be positive (or 0 for automatic)");
    }
    const double h = k.bandwidth;
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * M_PI));
    // Var(rho_hat(x)) ~ rho(x) R(K) / (n h), R(Gaussian) = 1/(2 sqrt(pi)).
    const double rk = 1.0 / (2.0 * std::sqrt(M_PI));
    k.density.assign(grid.size(), 0.0);
    k.se.assign(grid.size(), 0.0);
    const double* zs = samples.data();
    run_per_index(grid.size(), exec, [&](std::size_t j) {
        const double q = grid[j];
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (zs[i] - q) / h;
            if (t > 38.0 || t < -38.0) continue;
            s += std::exp(-0.5 * t * t);
        }
        k.density[j] = s * norm;
        k.se[j] = std::sqrt(std::max(0.0, k.density[j] * rk / (static_cast<double>(n) * h)));
    });
    return k;
}

std::vector<WilsonInterval> empirical_tail(const std::vector<double>& samples,
                                           const std::vector<double>& grid) {
    if (samples.empty()) throw DomainError("empirical_tail: empty sample");
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    std::vector<WilsonInterval> out(grid.size());
    const std::size_t n = sorted.size();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const std::size_t k = n - static_cast<std::size_t>(std::lower_bound(
                                      sorted.begin(), sorted.end(), grid[j]) -
                                  sorted.begin());
        out[j] = wilson95(k, n);
    }
    return out;
}

void ValidationReport::add(CheckRecord r) {
    if (r.status == CheckStatus::Soft) ++soft;
    if (r.status == CheckStatus::Hard) {
        ++hard;
        aggregate_pass = false;
    }
    records.push_back(std::move(r));
}

void containment_report(const KdeCurve& kde, const Envelope& env, ValidationReport& out) {
    if (kde.grid.size() != env.grid.size())
        throw DomainError("containment_report: grid mismatch");
    const std::size_t m = kde.grid.size();
    const double h = kde.bandwidth;
    const double floor = 2.0 / (static_cast<double>(kde.count) * h);
    std::size_t soft = 0, hard = 0;
    double worst = 0.0;
    double worst_z = nan_value;
    for (std::size_t j = 0; j < m; ++j) {
        // Smoothed derivatives for the bandwidth-bias allowance.
        const std::size_t jl = j > 0 ? j - 1 : j;
        const std::size_t jr = j + 1 < m ? j + 1 : j;
        const double dz = kde.grid[jr] - kde.grid[jl];
        const double d1 = dz > 0.0 ? (kde.density[jr] - kde.density[jl]) / dz : 0.0;
        double d2 = 0.0;
        if (j > 0 && j + 1 < m) {
            const double step = 0.5 * dz;
            d2 = (kde.density[j + 1] - 2.0 * kde.density[j] + kde.density[j - 1]) /
                 (step * step);
        }
        const double slack =
            1.96 * kde.se[j] + 2.0 * h * std::abs(d1) + 0.5 * h * h * std::abs(d2) + floor;
        const double lo_gap = env.lower[j] - kde.density[j]; // > 0: below the lower envelope
        const double hi_gap = kde.density[j] - env.upper[j]; // > 0: above the upper envelope
        const double gap = std::max(lo_gap, hi_gap);
        if (gap <= 0.0) continue;
        CheckRecord r;
        r.check = "envelope_containment";
        r.z = kde.grid[j];
        r.observed = kde.density[j];
        r.reference = lo_gap > hi_gap ? env.lower[j] : env.upper[j];
        r.slack = slack;
        r.status = gap > slack ? CheckStatus::Hard : CheckStatus::Soft;
        r.note = lo_gap > hi_gap ? "below lower envelope" : "above upper envelope";
        if (r.status == CheckStatus::Soft)
            ++soft;
        else
            ++hard;
        if (gap > worst) {
            worst = gap;
            worst_z = kde.grid[j];
        }
        out.add(std::move(r));
    }
    // Per-point violations were already counted through add(); the summary
    // line is informational only.
    CheckRecord summary;
    summary.check = "envelope_containment_summary";
    summary.z = worst_z;
    summary.observed = worst;
    summary.reference = 0.0;
    summary.slack = 0.0;
    summary.status = CheckStatus::Pass;
    summary.note = std::to_string(soft) + " soft, " + std::to_string(hard) + " hard of " +
                   std::to_string(m) + " points";
    out.records.push_back(std::move(summary));
}

namespace {

std::pair<std::string, std::string> split_label(const std::string& s) {
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos) return {s, ""};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

std::vector<double> parse_pair(const std::string& payload) {
    std::vector<double> out;
    std::istringstream ss(payload);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
    return out;
}

void add_scalar_check(ValidationReport& v, const std::string& id, double observed,
                      double reference, double slack, const std::string& note = "") {
    CheckRecord r;
    r.check = id;
    r.z = nan_value;
    r.observed = observed;
    r.reference = reference;
    r.slack = slack;
    r.status = std::abs(observed - reference) <= slack ? CheckStatus::Pass : CheckStatus::Hard;
    r.note = note;
    v.add(std::move(r));
}

void build_validation(ExperimentResult& r) {
    ValidationReport& v = r.validation;

    // E(integrand) must match Var(Z); the two sides come from independent
    // seeds, so the joint stderr is the quadrature sum.
    const MomentSummary mv = moments(r.gsamples.v);
    add_scalar_check(v, "identity_mean_integrand", mv.mean, r.centering.var,
                     3.0 * std::hypot(mv.mean_se, r.centering.var_se));

    // phi_hat(0) must match E|Z| / 2.
    {
        const std::size_t n = r.gsamples.z.size();
        std::vector<double> pos(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) pos[i] = r.gsamples.z[i] >= 0.0 ? r.gsamples.z[i] : 0.0;
        const MomentSummary mp = moments(pos);
        add_scalar_check(v, "identity_upper_moment_origin", mp.mean, 0.5 * r.centering.abs_mean,
                         3.0 * std::hypot(mp.mean_se, 0.5 * r.centering.abs_mean_se));
    }

    if (r.identity) {
        CheckRecord rec;
        rec.check = "identity_residual_sup";
        rec.z = nan_value;
        rec.observed = r.identity->rel_sup;
        rec.reference = 0.05;
        rec.slack = 0.0;
        rec.status = r.identity->rel_sup <= 0.05 ? CheckStatus::Pass : CheckStatus::Hard;
        v.add(std::move(rec));
    }

    if (r.density) {
        add_scalar_check(v, "density_mass", r.density->mass, 1.0, 0.05);
        add_scalar_check(v, "density_mean", r.density->mean, 0.0,
                         0.03 * std::sqrt(r.centering.var));
    } else {
        CheckRecord rec;
        rec.check = "density_available";
        rec.z = nan_value;
        rec.status = CheckStatus::Hard;
        rec.note = r.density_disabled_reason;
        v.add(std::move(rec));
    }

    if (r.envelope) containment_report(r.kde, *r.envelope, v);

    for (const TailColumn& col : r.tails.columns) {
        CheckRecord rec;
        rec.check = "tail_" + col.name;
        rec.z = nan_value;
        rec.observed = static_cast<double>(col.hard);
        rec.reference = 0.0;
        rec.slack = 0.0;
        rec.status = col.hard > 0 ? CheckStatus::Hard
                                  : (col.soft > 0 ? CheckStatus::Soft : CheckStatus::Pass);
        rec.note = std::to_string(col.soft) + " soft, " + std::to_string(col.hard) + " hard";
        v.add(std::move(rec));
    }

    if (r.tails.hyp_violation_frac > 0.0 || !r.tails.hyp_ok) {
        CheckRecord rec;
        rec.check = "hypothesis_linear_g";
        rec.z = nan_value;
        rec.observed = r.tails.hyp_violation_frac;
        rec.reference = 1e-3;
        rec.slack = 0.0;
        rec.status = r.tails.hyp_ok ? CheckStatus::Soft : CheckStatus::Hard;
        rec.note = "fraction of integrand draws above the alpha z + beta line";
        v.add(std::move(rec));
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, Exec exec) {
    ExperimentResult r;
    r.config = cfg;
    r.model = model_from_config(cfg);
    r.functional = functional_from_config(cfg);

    const std::size_t center_n = cfg.centering_samples ? cfg.centering_samples : cfg.samples;
    r.centering =
        center_and_absmean(r.functional, r.model, center_n, subseed(cfg.seed, 1), exec);
    r.functional.centering = r.centering;

    r.gsamples =
        draw_g_samples(r.functional, r.model, r.centering, cfg.samples, cfg.seed, cfg.strata, exec);

    const auto range = split_label(cfg.grid_range);
    const std::vector<double> ab = parse_pair(range.second);
    double lo, hi;
    if (range.first == "quantile") {
        std::vector<double> sorted(r.gsamples.z);
        std::sort(sorted.begin(), sorted.end());
        lo = quantile_sorted(sorted, ab[0]);
        hi = quantile_sorted(sorted, ab[1]);
    } else {
        lo = ab[0];
        hi = ab[1];
    }
    if (!(lo < 0.0 && hi > 0.0))
        throw DomainError("experiment grid [" + format_double(lo) + ", " + format_double(hi) +
                          "] must contain 0 strictly inside");
    r.grid = linspace(lo, hi, cfg.grid_points);

    r.gest = regress_g(r.gsamples, r.grid, r.centering.var, cfg.bandwidth, exec);
    r.ghat_range = g_range(r.gest, cfg.g_quantile);

    try {
        r.sigma = sigma_bounds(r.model, r.functional);
    } catch (const DegenerateEnvelope& e) {
        r.sigma_disabled_reason = e.what();
    }
    if (r.sigma)
        r.envelope =
            gaussian_envelope(r.grid, r.sigma->sigma_min_sq, r.sigma->sigma_max_sq,
                              r.centering.abs_mean);

    try {
        r.density = density_from_g(r.gest, r.centering.abs_mean, r.centering.abs_mean_se);
    } catch (const Error& e) {
        r.density_disabled_reason = e.what();
    }

    r.kde = kde_density(r.gsamples.z, r.grid, 0.0, exec);
    r.normality = normality_diagnostic(r.gsamples, r.gest, r.centering.var);
    if (r.density) r.identity = key_identity_residual(r.gsamples, r.gest, *r.density);

    r.alpha_thr = cfg.alpha_thr == "auto" ? 2.0 * std::sqrt(r.centering.var)
                                          : std::stod(cfg.alpha_thr);

    TailBoundParams tp;
    tp.abs_mean = r.centering.abs_mean;
    tp.mu_raw = r.centering.mu;
    tp.min_diag = r.model.covariance.min_diagonal();
    tp.beta_exp = cfg.beta_exp;
    tp.alpha_thr = r.alpha_thr;
    if (r.sigma) {
        tp.have_envelope = true;
        tp.sigma_min_sq = r.sigma->sigma_min_sq;
        tp.sigma_max_sq = r.sigma->sigma_max_sq;
    }
    switch (r.functional.kind) {
    case FunctionalKind::VectorMax:
    case FunctionalKind::ProcessSup:
        tp.comparison_valid = true;
        tp.sigma_max_sq = r.model.covariance.max_diagonal();
        tp.have_linear_g = true;
        tp.alpha = 0.0;
        tp.beta = tp.sigma_max_sq;
        break;
    case FunctionalKind::MonotoneIntegral:
        if (r.sigma) {
            tp.have_linear_g = true;
            tp.alpha = 0.0;
            tp.beta = r.sigma->sigma_max_sq;
        }
        break;
    case FunctionalKind::FbmQuadratic: {
        tp.is_quadratic = true;
        tp.hurst = r.model.hurst;
        double horizon = 0.0;
        for (double w : r.model.grid.weights) horizon += w;
        tp.horizon = horizon;
        const QuadraticParams qp = fbm_quadratic_params(tp.hurst, tp.horizon);
        tp.have_linear_g = true;
        tp.alpha = qp.alpha;
        tp.beta = qp.beta;
        break;
    }
    }
    r.tails = build_tail_report(r.gsamples, r.grid, tp, &r.gest,
                                r.density ? &*r.density : nullptr);

    build_validation(r);
    return r;
}

namespace {

std::vector<double> to_double(const std::vector<std::uint8_t>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
    return out;
}

} // namespace

std::string summary_json(const ExperimentResult& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["version"] = version_string;
    j["config"] = {{"path", r.config.source_path},
                   {"fingerprint", r.config.fingerprint},
                   {"seed", r.config.seed},
                   {"samples", r.config.samples},
                   {"strata", r.config.strata},
                   {"format", r.config.format}};
    j["model"] = {{"type", r.config.model_type},
                  {"dim", r.model.dim()},
                  {"cholesky_jitter", r.model.covariance.jitter()},
                  {"degenerate_grid", r.model.degenerate_grid}};
    j["functional"] = r.functional.name();
    j["centering"] = {{"count", r.centering.count},   {"mu", r.centering.mu},
                      {"abs_mean", r.centering.abs_mean}, {"var", r.centering.var},
                      {"mu_se", r.centering.mu_se},   {"abs_mean_se", r.centering.abs_mean_se},
                      {"var_se", r.centering.var_se}};
    j["g"] = {{"bandwidth", r.gest.bandwidth},
              {"clamp_floor", r.gest.clamp_floor},
              {"clamp_events", r.gest.clamp_events},
              {"flagged_points", r.gest.flagged_count},
              {"grid_points", r.gest.grid.size()},
              {"range_lo", r.ghat_range.first},
              {"range_hi", r.ghat_range.second}};
    if (r.sigma) {
        j["envelope"] = {{"enabled", true},
                         {"sigma_min_sq", r.sigma->sigma_min_sq},
                         {"sigma_max_sq", r.sigma->sigma_max_sq}};
    } else {
        j["envelope"] = {{"enabled", false}, {"reason", r.sigma_disabled_reason}};
    }
    if (r.density) {
        j["density"] = {{"mass", r.density->mass},
                        {"mean", r.density->mean},
                        {"run_lo", r.density->grid[r.density->run_begin]},
                        {"run_hi", r.density->grid[r.density->run_end - 1]}};
    } else {
        j["density"] = {{"available", false}, {"reason", r.density_disabled_reason}};
    }
    j["normality"] = {{"var_g", r.normality.var_g},
                      {"var_g_se", r.normality.var_g_se},
                      {"stein_gap_bound", r.normality.stein_gap_bound},
                      {"gauss_flag", r.normality.gauss_flag}};
    if (r.identity)
        j["identity"] = {{"residual_sup", r.identity->sup_abs},
                         {"phi0", r.identity->phi0},
                         {"residual_rel_sup", r.identity->rel_sup}};
    j["tails"] = {{"clip_events", r.tails.clip_events},
                  {"hyp_violation_frac", r.tails.hyp_violation_frac},
                  {"hyp_ok", r.tails.hyp_ok},
                  {"h_check_pass", r.tails.h_check_pass},
                  {"h_violations", r.tails.h_violations},
                  {"alpha_thr", r.alpha_thr},
                  {"soft", r.tails.soft_total},
                  {"hard", r.tails.hard_total}};
    j["validation"] = {{"checks", r.validation.records.size()},
                       {"soft", r.validation.soft},
                       {"hard", r.validation.hard},
                       {"aggregate_pass", r.validation.aggregate_pass}};
    return j.dump(2) + "\n";
}

std::string write_experiment_outputs(const ExperimentResult& r, unsigned sets) {
    namespace fs = std::filesystem;
    const fs::path dir(r.config.out_dir);
    fs::create_directories(dir);
    const bool csv = r.config.format == "csv" || r.config.format == "both";
    const bool json_out = r.config.format == "json" || r.config.format == "both";

    if (csv) {
        if (sets & output_set::gfun) {
            write_csv((dir / "gsamples.csv").string(), {"z", "v"},
                      {r.gsamples.z, r.gsamples.v});
            write_csv((dir / "gestimate.csv").string(),
                      {"z", "ghat", "stderr", "n_eff", "flagged"},
                      {r.gest.grid, r.gest.ghat, r.gest.se, r.gest.n_eff,
                       to_double(r.gest.flagged)});
        }
        if (sets & output_set::density) {
            if (r.density)
                write_csv((dir / "density.csv").string(), {"z", "rho", "rel_stderr", "flagged"},
                          {r.density->grid, r.density->rho, r.density->rel_se,
                           to_double(r.density->flagged)});
            if (r.envelope)
                write_csv((dir / "envelope.csv").string(), {"z", "lower", "upper"},
                          {r.envelope->grid, r.envelope->lower, r.envelope->upper});
            write_csv((dir / "kde.csv").string(), {"z", "density", "stderr"},
                      {r.kde.grid, r.kde.density, r.kde.se});
        }
        if (sets & output_set::tails) {
            std::vector<std::string> header = {"z",        "emp_right", "right_lo", "right_hi",
                                               "emp_left", "left_lo",   "left_hi",  "emp_both",
                                               "both_lo",  "both_hi"};
            std::vector<std::vector<double>> cols = {
                r.tails.z,        r.tails.emp_right, r.tails.right_lo, r.tails.right_hi,
                r.tails.emp_left, r.tails.left_lo,   r.tails.left_hi,  r.tails.emp_both,
                r.tails.both_lo,  r.tails.both_hi};
            for (const TailColumn& col : r.tails.columns) {
                header.push_back(col.name);
                cols.push_back(col.value);
                header.push_back(col.name + "_status");
                cols.push_back(to_double(col.status));
            }
            write_csv((dir / "tails.csv").string(), header, cols);
        }
        if (sets & output_set::validation) {
            std::ostringstream out;
            out << "check,z,observed,reference,slack,status,note\n";
            for (const CheckRecord& rec : r.validation.records) {
                out << rec.check << ',' << format_double(rec.z) << ','
                    << format_double(rec.observed) << ',' << format_double(rec.reference) << ','
                    << format_double(rec.slack) << ',' << status_name(rec.status) << ",\""
                    << rec.note << "\"\n";
            }
            write_text_file((dir / "validation.csv").string(), out.str());
        }
    }
    const std::string summary = summary_json(r);
    if (json_out) write_text_file((dir / "summary.json").string(), summary);
    return summary;
}

} // namespace gdens
