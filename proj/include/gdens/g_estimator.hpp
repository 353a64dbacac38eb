#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/functionals.hpp"

namespace gdens {

// Paired draws (z_i, v_i): centered functional value and one conditional
// variance integrand sample at that value.
struct GSamples {
    std::vector<double> z;
    std::vector<double> v;
    std::uint64_t seed = 0;
    std::uint32_t strata = 1;
    std::string functional;
};

// Draws count pairs.  For coupled functionals each draw consumes one path,
// one Exp(1) coupling time (stratified when strata > 1), and one coupled
// path; the quadratic functional evaluates its exact integrand on the path
// alone.  Bitwise deterministic in (seed, count, strata).
GSamples draw_g_samples(const Functional& fn, const GaussianModel& model,
                        const Centering& centering, std::size_t count, std::uint64_t seed,
                        std::uint32_t strata = 1, Exec exec = Exec::Parallel);

// Nadaraya-Watson estimate of g(z) = E(V | Z = z) on a grid.
struct GEstimate {
    std::vector<double> grid;
    std::vector<double> ghat;
    std::vector<double> se;       // within-window stderr
    std::vector<double> n_eff;    // Kish effective sample size
    std::vector<std::uint8_t> flagged; // n_eff below threshold: excluded downstream
    double bandwidth = 0.0;
    double clamp_floor = 0.0;
    std::size_t clamp_events = 0;
    std::size_t flagged_count = 0;
    std::size_t count = 0;

    // Linear interpolation of ghat / se at z (clamped to the grid ends).
    double ghat_at(double z) const;
    double se_at(double z) const;
};

inline constexpr double min_effective_count = 20.0;

// Gaussian-kernel regression; bandwidth 0 selects Silverman's rule from the
// z sample.  var_z sets the positivity clamp floor 1e-6 * var_z.
GEstimate regress_g(const GSamples& samples, const std::vector<double>& grid, double var_z,
                    double bandwidth = 0.0, Exec exec = Exec::Parallel);

// k-nearest-neighbour cross-check with k = ceil(sqrt(count)).
GEstimate regress_g_knn(const GSamples& samples, const std::vector<double>& grid, double var_z);

// Empirical (quantile q, 1-q) range of ghat over unflagged grid points.
std::pair<double, double> g_range(const GEstimate& est, double q);

} // namespace gdens
