#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/config.hpp"
#include "gdens/density.hpp"
#include "gdens/functionals.hpp"
#include "gdens/g_estimator.hpp"
#include "gdens/stats.hpp"
#include "gdens/tails.hpp"

namespace gdens {

// Gaussian kernel density estimate with pointwise stderr.
struct KdeCurve {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> se;
    double bandwidth = 0.0;
    std::size_t count = 0;
};

// bandwidth 0 selects Silverman's rule from the sample.
KdeCurve kde_density(const std::vector<double>& samples, const std::vector<double>& grid,
                     double bandwidth = 0.0, Exec exec = Exec::Parallel);

// Right-tail empirical curve with Wilson intervals.
std::vector<WilsonInterval> empirical_tail(const std::vector<double>& samples,
                                           const std::vector<double>& grid);

struct CheckRecord {
    std::string check;
    double z = 0.0; // NaN for scalar checks
    double observed = 0.0;
    double reference = 0.0; // bound or target
    double slack = 0.0;
    CheckStatus status = CheckStatus::Pass;
    std::string note;
};

struct ValidationReport {
    std::vector<CheckRecord> records;
    std::size_t soft = 0;
    std::size_t hard = 0;
    bool aggregate_pass = true;

    void add(CheckRecord r);
};

// Per-point comparison of a KDE against a density envelope.  The slack is
// the 95% CI plus a bandwidth-bias allowance estimated from the smoothed
// curve's derivatives plus a small counting floor; violations within slack
// are soft, outside it hard.
void containment_report(const KdeCurve& kde, const Envelope& env, ValidationReport& out);

// Everything one experiment produces.
struct ExperimentResult {
    ExperimentConfig config;
    GaussianModel model;
    Functional functional;
    Centering centering;
    GSamples gsamples;
    std::vector<double> grid;
    GEstimate gest;
    std::optional<SigmaBounds> sigma;
    std::string sigma_disabled_reason;
    std::optional<Envelope> envelope;
    std::optional<DensityEstimate> density;
    std::string density_disabled_reason;
    KdeCurve kde;
    NormalityDiagnostic normality;
    std::optional<IdentityResidual> identity;
    TailReport tails;
    ValidationReport validation;
    double alpha_thr = 0.0;
    std::pair<double, double> ghat_range{0.0, 0.0};
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

// Table groups a CLI subcommand may restrict the writer to.
namespace output_set {
inline constexpr unsigned gfun = 1u;       // gsamples.csv, gestimate.csv
inline constexpr unsigned density = 2u;    // density.csv, kde.csv, envelope.csv
inline constexpr unsigned tails = 4u;      // tails.csv
inline constexpr unsigned validation = 8u; // validation.csv
inline constexpr unsigned all = 15u;
} // namespace output_set

// Serializes the result per config.output: CSV tables and/or summary.json
// under cfg.out_dir (created if missing).  Returns the summary JSON text.
std::string write_experiment_outputs(const ExperimentResult& result,
                                     unsigned sets = output_set::all);
std::string summary_json(const ExperimentResult& result);

} // namespace gdens
