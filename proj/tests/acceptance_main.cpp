// Acceptance suite: runs every shipped experiment config end to end and
// checks the numbered claims the library makes about itself.  Prints one
// line per criterion and exits nonzero if any of them fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gdens/config.hpp"
#include "gdens/csv.hpp"
#include "gdens/harness.hpp"
#include "gdens/oracles.hpp"
#include "gdens/stats.hpp"
#include "gdens/tails.hpp"

namespace fs = std::filesystem;
using namespace gdens;

namespace {

int g_failures = 0;

void report(int k, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%d/8] %s: %s (%s)\n", k, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Run {
    ExperimentResult result;
    double seconds = 0.0;
    fs::path out_a;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

const TailColumn* find_column(const TailReport& rep, const std::string& name) {
    for (const TailColumn& c : rep.columns)
        if (c.name == name) return &c;
    return nullptr;
}

const CheckRecord* find_record(const ValidationReport& v, const std::string& check) {
    for (const CheckRecord& r : v.records)
        if (r.check == check) return &r;
    return nullptr;
}

std::size_t hard_containment(const ValidationReport& v) {
    std::size_t n = 0;
    for (const CheckRecord& r : v.records)
        if (r.check == "envelope_containment" && r.status == CheckStatus::Hard) ++n;
    return n;
}

} // namespace

int main() {
    const fs::path config_dir = GDENS_CONFIG_DIR;
    const fs::path tmp = fs::temp_directory_path() / "gdens_acceptance";
    std::error_code ec;
    fs::remove_all(tmp, ec);

    const std::vector<std::string> names = {
        "gaussian_1d",       "bivariate_max_indep", "bivariate_max_corr", "fbm_sup",
        "fbm_quadratic_h05", "fbm_quadratic_h075",  "monotone_integral"};

    std::map<std::string, Run> runs;
    try {
        for (const std::string& name : names) {
            ExperimentConfig cfg = load_config((config_dir / (name + ".cfg")).string());
            Run run;
            run.out_a = tmp / name / "a";
            cfg.out_dir = run.out_a.string();
            const auto t0 = std::chrono::steady_clock::now();
            run.result = run_experiment(cfg);
            run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
            write_experiment_outputs(run.result);
            std::printf("  ran %-20s %6.1fs  (%zu draws)\n", name.c_str(), run.seconds,
                        run.result.gsamples.z.size());
            std::fflush(stdout);
            runs.emplace(name, std::move(run));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: experiment failed: %s\n", e.what());
        return 1;
    }

    // ---- 1: the 1-d Gaussian sanity case reproduces the exact answers ----
    {
        const Run& run = runs.at("gaussian_1d");
        const ExperimentResult& r = run.result;
        const GaussianOracle oracle{1.0};
        bool pass = run.seconds < 60.0;
        std::string why = pass ? "" : "too slow; ";
        double sup = 0.0;
        if (r.density.has_value()) {
            for (std::size_t j = r.density->run_begin; j < r.density->run_end; ++j)
                if (std::abs(r.grid[j]) <= 3.0)
                    sup = std::max(sup, std::abs(r.density->rho[j] - oracle.density(r.grid[j])));
        } else {
            pass = false;
            why += "no density; ";
        }
        if (sup > 0.02) {
            pass = false;
            why += "density error " + fmt(sup) + "; ";
        }
        double glo = 1.0, ghi = 1.0;
        for (std::size_t j = 0; j < r.grid.size(); ++j)
            if (std::abs(r.grid[j]) <= 2.0 && !r.gest.flagged[j]) {
                glo = std::min(glo, r.gest.ghat[j]);
                ghi = std::max(ghi, r.gest.ghat[j]);
            }
        if (glo < 0.95 || ghi > 1.05) {
            pass = false;
            why += "ghat range [" + fmt(glo) + "," + fmt(ghi) + "]; ";
        }
        if (!r.normality.gauss_flag) {
            pass = false;
            why += "gauss_flag not set; ";
        }
        report(1, "gaussian_sanity", pass,
               why.empty() ? "density sup err " + fmt(sup) + ", ghat in [" + fmt(glo) + "," +
                                 fmt(ghi) + "], " + fmt(run.seconds) + "s"
                           : why);
    }

    // ---- 2: bivariate maxima match the closed-form law and the envelope ----
    {
        const ExperimentResult& ind = runs.at("bivariate_max_indep").result;
        const ExperimentResult& cor = runs.at("bivariate_max_corr").result;
        bool pass = true;
        std::string why;
        const MaxTwoOracle oracle{0.0};
        double sup = 0.0;
        if (ind.density.has_value()) {
            for (std::size_t j = ind.density->run_begin; j < ind.density->run_end; ++j)
                sup = std::max(sup, std::abs(ind.density->rho[j] - oracle.density(ind.grid[j])));
        } else {
            pass = false;
            why += "independent case lost its density; ";
        }
        if (sup > 0.03) {
            pass = false;
            why += "independent density err " + fmt(sup) + "; ";
        }
        const std::size_t hard = hard_containment(cor.validation);
        if (hard != 0) {
            pass = false;
            why += std::to_string(hard) + " hard envelope violations; ";
        }
        double max_se = 0.0;
        for (std::size_t j = 0; j < cor.grid.size(); ++j)
            if (!cor.gest.flagged[j]) max_se = std::max(max_se, cor.gest.se[j]);
        const double lo = cor.ghat_range.first, hi = cor.ghat_range.second;
        if (lo < 0.5 - 2.0 * max_se || hi > 1.0 + 2.0 * max_se) {
            pass = false;
            why += "ghat quantile range [" + fmt(lo) + "," + fmt(hi) +
                   "] escapes [0.5,1] beyond noise; ";
        }
        report(2, "bivariate_maxima", pass,
               why.empty() ? "density sup err " + fmt(sup) + ", ghat range [" + fmt(lo) + "," +
                                 fmt(hi) + "] vs [0.5,1]"
                           : why);
    }

    // ---- 3: fBm supremum density is sandwiched by the Gaussian envelope ----
    {
        const Run& run = runs.at("fbm_sup");
        const ExperimentResult& r = run.result;
        bool pass = run.seconds < 300.0;
        std::string why = pass ? "" : "too slow; ";
        const std::size_t hard = hard_containment(r.validation);
        if (hard != 0) {
            pass = false;
            why += std::to_string(hard) + " hard envelope violations; ";
        }
        if (r.grid.back() < 2.5) {
            pass = false;
            why += "grid stops at " + fmt(r.grid.back()) + " < 2.5; ";
        }
        for (const char* col_name : {"envelope_right_lower", "envelope_right_upper"}) {
            const TailColumn* col = find_column(r.tails, col_name);
            if (col == nullptr) {
                pass = false;
                why += std::string(col_name) + " missing; ";
                continue;
            }
            std::size_t bad = 0;
            for (std::size_t i = 0; i < r.tails.z.size(); ++i)
                if (r.tails.z[i] >= 0.25 && r.tails.z[i] <= 2.5 &&
                    col->status[i] == static_cast<std::uint8_t>(CheckStatus::Hard))
                    ++bad;
            if (bad != 0) {
                pass = false;
                why += std::string(col_name) + " hard at " + std::to_string(bad) + " points; ";
            }
        }
        report(3, "fbm_sup_envelope", pass,
               why.empty() ? "no hard violations, tail sandwich holds on [0.25,2.5], " +
                                 fmt(run.seconds) + "s"
                           : why);
    }

    // ---- 4: quadratic functional obeys its linear-variance tail bounds ----
    {
        bool pass = true;
        std::string why;
        for (const char* name : {"fbm_quadratic_h05", "fbm_quadratic_h075"}) {
            const ExperimentResult& r = runs.at(name).result;
            const TailColumn* conc = find_column(r.tails, "concentration_right_upper");
            const TailColumn* quad = find_column(r.tails, "quadratic_right_lower");
            if (conc == nullptr || quad == nullptr) {
                pass = false;
                why += std::string(name) + ": bound column missing; ";
                continue;
            }
            if (conc->hard != 0) {
                pass = false;
                why += std::string(name) + ": concentration hard at " +
                       std::to_string(conc->hard) + " points; ";
            }
            if (quad->hard != 0) {
                pass = false;
                why += std::string(name) + ": quadratic lower hard at " +
                       std::to_string(quad->hard) + " points; ";
            }
            if (r.tails.hyp_violation_frac != 0.0 || !r.tails.hyp_ok) {
                pass = false;
                why += std::string(name) + ": linear hypothesis violated on " +
                       fmt(r.tails.hyp_violation_frac) + " of draws; ";
            }
        }
        report(4, "quadratic_tail_bounds", pass,
               why.empty() ? "both Hurst cases: bounds hold, hypothesis frac 0" : why);
    }

    // ---- 5: the key identity g * rho = phi holds across functionals ----
    {
        bool pass = true;
        std::string why;
        double worst = 0.0;
        for (const char* name :
             {"bivariate_max_corr", "fbm_sup", "monotone_integral", "fbm_quadratic_h05"}) {
            const ExperimentResult& r = runs.at(name).result;
            for (const char* check : {"identity_mean_integrand", "identity_residual_sup",
                                      "identity_upper_moment_origin"}) {
                const CheckRecord* rec = find_record(r.validation, check);
                if (rec == nullptr) {
                    pass = false;
                    why += std::string(name) + ": " + check + " missing; ";
                } else if (rec->status != CheckStatus::Pass) {
                    pass = false;
                    why += std::string(name) + ": " + check + " observed " +
                           fmt(rec->observed) + " vs " + fmt(rec->reference) + "; ";
                }
            }
            if (r.identity.has_value()) worst = std::max(worst, r.identity->rel_sup);
        }
        report(5, "key_identity", pass,
               why.empty() ? "all identity checks pass, worst relative residual " + fmt(worst)
                           : why);
    }

    // ---- 6: closed-form bound families agree where they must coincide ----
    {
        bool pass = true;
        std::string why;
        for (double s2 : {0.3, 1.0, 2.7}) {
            for (double z : linspace(0.05, 4.0, 80)) {
                const ClassicBounds cb = classic_bounds(s2, z);
                const double conc = concentration_upper(0.0, s2, z);
                if (std::abs(cb.right - conc) > 1e-14 * std::max(1.0, cb.right)) {
                    pass = false;
                    why += "classic vs alpha=0 concentration differ at z=" + fmt(z) + "; ";
                }
                if (cb.left != cb.right || std::abs(cb.both - 2.0 * cb.right) > 1e-15) {
                    pass = false;
                    why += "classic side bookkeeping broken at z=" + fmt(z) + "; ";
                }
            }
        }
        for (double hurst : {0.3, 0.5, 0.75, 0.9}) {
            for (double horizon : {0.5, 1.0, 2.0}) {
                const QuadraticParams qp = fbm_quadratic_params(hurst, horizon);
                const double c = hurst + 0.5;
                const double t_pow = std::pow(horizon, 2.0 * hurst + 1.0);
                if (std::abs(qp.alpha - t_pow / c) > 1e-12 * qp.alpha ||
                    std::abs(qp.mu_q - t_pow / (2.0 * hurst + 1.0)) > 1e-12 * qp.mu_q ||
                    std::abs(qp.beta - qp.alpha * qp.mu_q) > 1e-12 * qp.beta ||
                    std::abs(qp.sigma_q_sq -
                             std::pow(horizon, 2.0 * hurst + 2.0) / (2.0 * hurst + 2.0)) >
                        1e-12 * qp.sigma_q_sq) {
                    pass = false;
                    why += "quadratic constants off at H=" + fmt(hurst) + ",T=" + fmt(horizon) +
                           "; ";
                }
                for (double z : {0.3, 1.0, 2.5}) {
                    const double direct = std::exp(-c * c * z * z /
                                                   (2.0 * c * t_pow * z + t_pow * t_pow));
                    const double via = concentration_upper(qp.alpha, qp.beta, z);
                    if (std::abs(via - direct) > 1e-12 * direct) {
                        pass = false;
                        why += "concentration mismatch at H=" + fmt(hurst) + ",z=" + fmt(z) +
                               "; ";
                    }
                }
            }
        }
        const std::vector<std::pair<double, double>> sigma_pairs = {
            {0.5, 1.0}, {1.0, 1.0}, {0.25, 2.0}};
        for (const auto& [smin, smax] : sigma_pairs) {
            const Envelope env = gaussian_envelope(linspace(-3.0, 3.0, 61), smin, smax, 0.8);
            for (std::size_t j = 0; j < env.grid.size(); ++j)
                if (env.lower[j] > env.upper[j] * (1.0 + 1e-15)) {
                    pass = false;
                    why += "envelope inverted at z=" + fmt(env.grid[j]) + "; ";
                }
            for (double z : linspace(0.1, 4.0, 40)) {
                const EnvelopeTails et = integrated_envelope_tails(smin, smax, 0.8, z);
                if (et.lower > et.upper * (1.0 + 1e-15)) {
                    pass = false;
                    why += "envelope tails inverted at z=" + fmt(z) + "; ";
                }
            }
        }
        report(6, "bound_family_consistency", pass, why.empty() ? "all sweeps agree" : why);
    }

    // ---- 7: decay-rate machinery validates on the exact Gaussian ----
    {
        bool pass = true;
        std::string why;
        const ExperimentResult& r = runs.at("gaussian_1d").result;
        if (!r.density.has_value()) {
            pass = false;
            why += "no density from gaussian_1d; ";
        } else {
            const HMonotonicityCheck h = h_monotonicity_check(*r.density, 2.0, 2.0);
            if (!h.pass) {
                pass = false;
                why += "h-monotonicity rejected the Gaussian (" +
                       std::to_string(h.violations.size()) + " violations); ";
            }
        }
        const double abs_mean = std::sqrt(2.0 / M_PI);
        for (double z : linspace(2.0, 4.0, 41)) {
            const double bound = decay_lower(1.0, abs_mean, 2.0, 2.0, z);
            if (bound > norm_tail(z) * (1.0 + 1e-12)) {
                pass = false;
                why += "decay lower exceeds the true tail at z=" + fmt(z) + "; ";
            }
        }
        GEstimate unit;
        unit.grid = linspace(-4.0, 4.0, 801);
        unit.ghat.assign(unit.grid.size(), 1.0);
        unit.se.assign(unit.grid.size(), 0.0);
        unit.n_eff.assign(unit.grid.size(), 1e6);
        unit.flagged.assign(unit.grid.size(), 0);
        const GfunTailLower ref = gfun_tail_lower(unit, 1.0, abs_mean, 1.0);
        if (std::abs(ref.value - 0.0923) > 1e-3) {
            pass = false;
            why += "gfun lower at z=1 is " + fmt(ref.value) + ", expected ~0.0923; ";
        }
        for (double z : {0.5, 1.0, 2.0, 3.0}) {
            const GfunTailLower b = gfun_tail_lower(unit, 1.0, abs_mean, z);
            if (b.value > norm_tail(z) * (1.0 + 1e-12)) {
                pass = false;
                why += "gfun lower exceeds the true tail at z=" + fmt(z) + "; ";
            }
        }
        report(7, "decay_rate_bounds", pass,
               why.empty() ? "h-check passes, closed-form lower bounds stay below the exact tail"
                           : why);
    }

    // ---- 8: bitwise reproducibility and sample-size consistency ----
    {
        bool pass = true;
        std::string why;
        try {
            for (const std::string& name : names) {
                ExperimentConfig cfg = load_config((config_dir / (name + ".cfg")).string());
                const fs::path out_b = tmp / name / "b";
                cfg.out_dir = out_b.string();
                const ExperimentResult r2 = run_experiment(cfg);
                write_experiment_outputs(r2);
                std::size_t files = 0;
                for (const auto& entry : fs::directory_iterator(runs.at(name).out_a)) {
                    ++files;
                    const fs::path b_file = out_b / entry.path().filename();
                    if (!fs::exists(b_file)) {
                        pass = false;
                        why += name + ": rerun did not produce " +
                               entry.path().filename().string() + "; ";
                        continue;
                    }
                    if (file_fingerprint(entry.path().string()) !=
                        file_fingerprint(b_file.string())) {
                        pass = false;
                        why += name + "/" + entry.path().filename().string() +
                               " differs between identical runs; ";
                    }
                }
                if (files == 0) {
                    pass = false;
                    why += name + ": no outputs written; ";
                }
            }

            // Doubling the draw count must move ghat only within its noise.
            ExperimentConfig cfg =
                load_config((config_dir / "bivariate_max_corr.cfg").string());
            const ExperimentResult& r1 = runs.at("bivariate_max_corr").result;
            cfg.samples *= 2;
            cfg.bandwidth = r1.gest.bandwidth; // pin smoothing so estimates are comparable
            cfg.out_dir = (tmp / "bivariate_max_corr" / "double").string();
            const ExperimentResult r2 = run_experiment(cfg);
            std::size_t compared = 0, exceed = 0;
            double worst = 0.0;
            for (std::size_t j = 0; j < r1.grid.size(); ++j) {
                if (r1.gest.flagged[j] || r2.gest.flagged[j]) continue;
                const double tol = 2.0 * std::hypot(r1.gest.se[j], r2.gest.se[j]);
                if (!(tol > 0.0)) continue;
                ++compared;
                const double diff = std::abs(r1.gest.ghat[j] - r2.gest.ghat[j]);
                worst = std::max(worst, diff / tol);
                if (diff > tol) ++exceed;
            }
            const std::size_t allowed = std::max<std::size_t>(1, compared / 100);
            if (compared < 100 || exceed > allowed) {
                pass = false;
                why += "doubling moved ghat beyond noise at " + std::to_string(exceed) + "/" +
                       std::to_string(compared) + " points; ";
            }
            if (why.empty())
                why = "all outputs bitwise reproducible; doubled-sample ghat within noise (worst "
                      + fmt(worst) + " of tolerance, " + std::to_string(exceed) + "/" +
                      std::to_string(compared) + " over)";
        } catch (const std::exception& e) {
            pass = false;
            why += std::string("exception: ") + e.what();
        }
        report(8, "reproducibility", pass, why);
    }

    fs::remove_all(tmp, ec);
    if (g_failures > 0) {
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("acceptance: all 8 criteria passed\n");
    return 0;
}
