#include "gdens/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace gdens {

double fbm_covariance(double s, double t, double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fbm_covariance: hurst must be in (0,1)");
    if (s < 0.0 || t < 0.0) throw DomainError("fbm_covariance: times must be >= 0");
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

ProcessGrid ProcessGrid::trapezoid(std::vector<double> times) {
    if (times.size() < 2) throw DomainError("grid needs at least 2 times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("grid times must be strictly increasing");
    const std::size_t m = times.size();
    std::vector<double> w(m);
    w[0] = 0.5 * (times[1] - times[0]);
    for (std::size_t i = 1; i + 1 < m; ++i) w[i] = 0.5 * (times[i + 1] - times[i - 1]);
    w[m - 1] = 0.5 * (times[m - 1] - times[m - 2]);
    ProcessGrid g;
    g.times = std::move(times);
    g.weights = std::move(w);
    return g;
}

ProcessGrid ProcessGrid::midpoint_cells(double horizon, std::size_t m) {
    if (!(horizon > 0.0) || m < 2) throw DomainError("midpoint grid needs horizon > 0, m >= 2");
    ProcessGrid g;
    g.times.resize(m);
    g.weights.assign(m, horizon / static_cast<double>(m));
    for (std::size_t k = 0; k < m; ++k)
        g.times[k] = (static_cast<double>(k) + 0.5) * horizon / static_cast<double>(m);
    return g;
}

namespace {

// Plain lower Cholesky; returns false if a pivot is not strictly positive.
bool try_cholesky(std::size_t n, const std::vector<double>& k, double jitter,
                  std::vector<double>& l) {
    l.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = k[i * n + j];
            if (i == j) s += jitter;
            for (std::size_t p = 0; p < j; ++p) s -= l[i * n + p] * l[j * n + p];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    return true;
}

} // namespace

CovarianceMatrix CovarianceMatrix::build(std::size_t n, std::vector<double> row_major) {
    if (n == 0 || row_major.size() != n * n)
        throw DomainError("covariance: entry count does not match dimension");
    CovarianceMatrix c;
    c.n_ = n;
    c.k_ = std::move(row_major);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(c.k_[i * n + i] > 0.0))
            throw NotPositiveDefinite("covariance: diagonal must be strictly positive");
        scale = std::max(scale, std::abs(c.k_[i * n + i]));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = c.k_[i * n + j], b = c.k_[j * n + i];
            if (std::abs(a - b) > 1e-12 * std::max(1.0, scale))
                throw DomainError("covariance: matrix is not symmetric");
            // Store the symmetrized value so downstream algebra is exact.
            const double s = 0.5 * (a + b);
            c.k_[i * n + j] = s;
            c.k_[j * n + i] = s;
        }
    if (try_cholesky(n, c.k_, 0.0, c.chol_)) {
        c.jitter_ = 0.0;
        return c;
    }
    const double jitter = 1e-10 * c.trace() / static_cast<double>(n);
    if (try_cholesky(n, c.k_, jitter, c.chol_)) {
        c.jitter_ = jitter;
        return c;
    }
    throw NotPositiveDefinite("covariance: Cholesky failed even with capped jitter");
}

double CovarianceMatrix::min_entry() const { return *std::min_element(k_.begin(), k_.end()); }

double CovarianceMatrix::max_entry() const { return *std::max_element(k_.begin(), k_.end()); }

double CovarianceMatrix::max_diagonal() const {
    double m = k_[0];
    for (std::size_t i = 1; i < n_; ++i) m = std::max(m, k_[i * n_ + i]);
    return m;
}

double CovarianceMatrix::min_diagonal() const {
    double m = k_[0];
    for (std::size_t i = 1; i < n_; ++i) m = std::min(m, k_[i * n_ + i]);
    return m;
}

double CovarianceMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += k_[i * n_ + i];
    return t;
}

void CovarianceMatrix::transform(const double* xi, double* y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = &chol_[i * n_];
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += row[j] * xi[j];
        y[i] = s;
    }
}

namespace {

// Near-duplicate rows mean E|X_t - X_s|^2 ~ 0 for distinct grid points;
// flagged so envelope-based results can be disabled downstream.  The cutoff
// sits at sqrt(machine epsilon)-ish, where the Cholesky rows become
// numerically dependent; honest fine grids stay orders of magnitude above.
bool has_degenerate_pair(const CovarianceMatrix& k) {
    const std::size_t n = k.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double incr = k.at(i, i) + k.at(j, j) - 2.0 * k.at(i, j);
            if (incr <= 1e-8 * std::max(k.at(i, i), k.at(j, j))) return true;
        }
    return false;
}

} // namespace

GaussianModel build_model(CovarianceMatrix k) {
    GaussianModel m;
    m.kind = KernelKind::Explicit;
    m.degenerate_grid = has_degenerate_pair(k);
    m.covariance = std::move(k);
    return m;
}

GaussianModel build_fbm_model(ProcessGrid grid, double hurst) {
    for (double t : grid.times)
        if (!(t > 0.0)) throw DomainError("fbm model: grid times must be strictly positive");
    const std::size_t n = grid.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = fbm_covariance(grid.times[i], grid.times[j], hurst);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    GaussianModel m;
    m.kind = KernelKind::Fbm;
    m.covariance = CovarianceMatrix::build(n, std::move(k));
    m.degenerate_grid = has_degenerate_pair(m.covariance);
    m.grid = std::move(grid);
    m.hurst = hurst;
    return m;
}

GaussianModel build_tabulated_model(ProcessGrid grid, std::vector<double> kernel_row_major) {
    const std::size_t n = grid.size();
    GaussianModel m;
    m.kind = KernelKind::Tabulated;
    m.covariance = CovarianceMatrix::build(n, std::move(kernel_row_major));
    m.degenerate_grid = has_degenerate_pair(m.covariance);
    m.grid = std::move(grid);
    return m;
}

} // namespace gdens
