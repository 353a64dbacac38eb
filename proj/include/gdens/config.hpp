#pragma once

#include <cstdint>
#include <string>

#include "gdens/common.hpp"
#include "gdens/covariance.hpp"
#include "gdens/functionals.hpp"

namespace gdens {

// Flat sectioned key = value experiment description.  Unknown sections or
// keys are errors; referenced files are resolved against the config's
// directory and must exist at parse time.
struct ExperimentConfig {
    // [model]
    std::string model_type; // explicit | fbm | tabulated
    std::string k_csv;      // matrix file (explicit / tabulated)
    std::string k_inline;   // inline rows "1,0.5;0.5,1"
    std::string grid_spec;  // uniform:a,b,m | midpoint:T,m | csv:path
    double hurst = 0.5;

    // [functional]
    std::string variant; // vector_max | process_sup | monotone_integral | fbm_quadratic
    std::string f_spec;  // linear:s | sigmoid:lo,hi | csv:path

    // [mc]
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint32_t strata = 1;
    std::size_t centering_samples = 0; // 0: same as samples

    // [grid]
    std::size_t grid_points = 401;
    std::string grid_range = "quantile:0.005,0.995"; // or fixed:lo,hi
    double bandwidth = 0.0;                          // 0: Silverman

    // [tails]
    double beta_exp = 2.0;
    std::string alpha_thr = "auto"; // auto: 2 * sd(Z)
    double g_quantile = 0.05;

    // [output]
    std::string out_dir = "out";
    std::string format = "both"; // csv | json | both

    // provenance
    std::string source_path;
    std::string fingerprint;
    std::string base_dir;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

// Materialize the model and functional described by the config.
GaussianModel model_from_config(const ExperimentConfig& cfg);
Functional functional_from_config(const ExperimentConfig& cfg);

} // namespace gdens
