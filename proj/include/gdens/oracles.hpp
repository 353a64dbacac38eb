#pragma once

#include "gdens/common.hpp"

namespace gdens {

// Closed forms for a centered Gaussian N(0, sigma^2): the fixed point of
// the whole pipeline (g is constant).
struct GaussianOracle {
    double sigma_sq = 1.0;

    double density(double z) const;
    double g(double z) const; // == sigma_sq
    double upper_moment(double z) const; // int_z^inf y rho(y) dy
    double right_tail(double z) const;
    double abs_mean() const;
};

// Centered maximum of two standard normals with correlation corr:
// Z = max(N1, N2) - E max.  Density is closed-form; the partial moments
// and tails are closed-form at corr = 0 and high-accuracy quadrature
// otherwise.
struct MaxTwoOracle {
    double corr = 0.0;

    double mean_raw() const;         // E max = sqrt((1-corr)/pi)
    double density_raw(double t) const; // density of the uncentered max
    double density(double z) const;  // centered
    double right_tail(double z) const;
    double upper_moment(double z) const;
    double g(double z) const; // upper_moment / density
    double abs_mean() const;
};

} // namespace gdens
