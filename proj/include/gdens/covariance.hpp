#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gdens/common.hpp"

namespace gdens {

// Fractional Brownian motion covariance (t^{2H} + s^{2H} - |t-s|^{2H}) / 2
// for Hurst index H in (0,1) and s, t >= 0.
double fbm_covariance(double s, double t, double hurst);

// Strictly increasing time grid with quadrature weights.
struct ProcessGrid {
    std::vector<double> times;
    std::vector<double> weights;

    // Trapezoid weights on the given times; sum of weights equals the span
    // times.back() - times.front().
    static ProcessGrid trapezoid(std::vector<double> times);

    // m midpoint nodes (k-1/2)*horizon/m with uniform weights horizon/m;
    // sum of weights equals horizon and all nodes are strictly positive.
    static ProcessGrid midpoint_cells(double horizon, std::size_t m);

    std::size_t size() const { return times.size(); }
    double span() const { return times.back() - times.front(); }
};

// Symmetric positive (semi)definite covariance with a cached Cholesky
// factor.  Construction validates symmetry and the strictly positive
// diagonal, then factors, adding at most one diagonal jitter of
// 1e-10 * trace / n before failing with NotPositiveDefinite.
class CovarianceMatrix {
  public:
    // Default state is the empty (0 x 0) matrix; build() makes a usable one.
    CovarianceMatrix() = default;

    static CovarianceMatrix build(std::size_t n, std::vector<double> row_major);

    std::size_t dim() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return k_[i * n_ + j]; }
    const std::vector<double>& entries() const { return k_; }
    // Lower-triangular Cholesky factor L with K + jitter*I = L L^T,
    // row-major with zero upper triangle.
    const std::vector<double>& cholesky() const { return chol_; }
    double jitter() const { return jitter_; }

    double min_entry() const;
    double max_entry() const;
    double max_diagonal() const;
    double min_diagonal() const;
    double trace() const;

    // y = L * xi (xi has length n).
    void transform(const double* xi, double* y) const;

  private:
    std::size_t n_ = 0;
    std::vector<double> k_;
    std::vector<double> chol_;
    double jitter_ = 0.0;
};

enum class KernelKind { Explicit, Fbm, Tabulated };

// Gaussian model: a covariance (possibly induced by a kernel on a grid)
// plus the grid when the functional is process-valued.
struct GaussianModel {
    KernelKind kind = KernelKind::Explicit;
    CovarianceMatrix covariance;
    ProcessGrid grid;         // empty for plain vector models
    double hurst = 0.0;       // fBm models only
    bool degenerate_grid = false; // near-duplicate grid rows detected

    std::size_t dim() const { return covariance.dim(); }
    bool has_grid() const { return !grid.times.empty(); }
};

// Explicit covariance on an abstract index set.
GaussianModel build_model(CovarianceMatrix k);

// fBm covariance assembled on the grid times (all strictly positive).
GaussianModel build_fbm_model(ProcessGrid grid, double hurst);

// Tabulated kernel values (row-major, matching the grid) on the grid.
GaussianModel build_tabulated_model(ProcessGrid grid, std::vector<double> kernel_row_major);

} // namespace gdens
