#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/covariance.hpp"
#include "gdens/sampling.hpp"

namespace gdens {

// Nondecreasing integrand f for the integral functional, with known global
// derivative bounds deriv_min <= f' <= deriv_max.
class MonotoneFn {
  public:
    // f(x) = slope * x.
    static MonotoneFn linear(double slope);
    // f(x) = lo * x + (hi - lo) * softplus-blend; f' runs from lo to hi
    // through a logistic sigmoid, staying strictly inside [lo, hi].
    static MonotoneFn sigmoid_blend(double lo, double hi);
    // Piecewise-linear interpolation of (x, y) knots, extrapolated with the
    // end slopes; derivative bounds come from the segment slopes.
    static MonotoneFn tabulated(std::vector<double> xs, std::vector<double> ys);

    double value(double x) const;
    double deriv(double x) const;
    double deriv_min() const { return deriv_min_; }
    double deriv_max() const { return deriv_max_; }
    const std::string& describe() const { return describe_; }

  private:
    enum class Kind { Linear, Sigmoid, Tabulated } kind_ = Kind::Linear;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> xs_, ys_, slopes_;
    double deriv_min_ = 0.0, deriv_max_ = 0.0;
    std::string describe_;
};

enum class FunctionalKind { VectorMax, ProcessSup, MonotoneIntegral, FbmQuadratic };

// Monte Carlo centering constants, estimated once per experiment.
struct Centering {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    double mu = 0.0;       // E(raw functional)
    double abs_mean = 0.0; // E|Z| for the centered Z
    double var = 0.0;      // Var(Z), unbiased
    double mu_se = 0.0;
    double abs_mean_se = 0.0;
    double var_se = 0.0;
};

// A functional of the Gaussian model: coordinate max, grid supremum,
// quadrature of a monotone integrand, or the quadratic fBm functional.
struct Functional {
    FunctionalKind kind = FunctionalKind::VectorMax;
    MonotoneFn f;           // MonotoneIntegral only
    std::optional<Centering> centering;

    static Functional vector_max();
    static Functional process_sup();
    static Functional monotone_integral(MonotoneFn f);
    static Functional fbm_quadratic();

    const char* name() const;
    bool needs_grid() const { return kind != FunctionalKind::VectorMax; }
    // The quadratic integrand is exact; no coupled path is drawn for it.
    bool uses_coupling() const { return kind != FunctionalKind::FbmQuadratic; }
};

// Raw (uncentered) functional value of one path.
double evaluate(const Functional& fn, const GaussianModel& model, const double* path);

// Index of the first maximal coordinate (ties resolved to the smallest).
std::size_t argmax_index(const double* x, std::size_t n);

// One conditional-variance integrand draw: the inner product of the two
// coupled gradient factors.  Not defined for FbmQuadratic (its integrand is
// exact and needs no coupling; see quadratic_g_exact).
double mehler_inner(const Functional& fn, const GaussianModel& model, const CoupledPair& pair);

// Exact integrand for the quadratic functional: half the squared gradient
// norm, 2 * sum_ij w_i w_j path_i path_j K_ij.
double quadratic_g_exact(const GaussianModel& model, const double* path);

// Estimates mu = E(raw), E|Z| and Var(Z) with a dedicated seed.
Centering center_and_absmean(const Functional& fn, const GaussianModel& model, std::size_t count,
                             std::uint64_t seed, Exec exec = Exec::Parallel);

// Envelope parameters (sigma_min^2, sigma_max^2) for functionals whose
// conditional variance is bounded: the extreme covariance entries for max /
// sup functionals, the quadratic-form pair for the monotone integral.
// Throws DegenerateEnvelope when no envelope applies (quadratic functional,
// sigma_min^2 <= 0, negative kernel entries, or a degenerate grid).
struct SigmaBounds {
    double sigma_min_sq = 0.0;
    double sigma_max_sq = 0.0;
};
SigmaBounds sigma_bounds(const GaussianModel& model, const Functional& fn);

} // namespace gdens
