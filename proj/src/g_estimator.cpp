#include "gdens/g_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdens/parallel.hpp"
#include "gdens/stats.hpp"

namespace gdens {

GSamples draw_g_samples(const Functional& fn, const GaussianModel& model,
                        const Centering& centering, std::size_t count, std::uint64_t seed,
                        std::uint32_t strata, Exec exec) {
    if (count == 0) throw DomainError("draw_g_samples: count must be positive");
    if (strata == 0) throw DomainError("draw_g_samples: strata must be >= 1");
    GSamples gs;
    gs.z.resize(count);
    gs.v.resize(count);
    gs.seed = seed;
    gs.strata = strata;
    gs.functional = fn.name();
    const double mu = centering.mu;
    const std::size_t n = model.dim();
    run_chunked(count, exec, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RandomStream rs(seed, chunk);
        std::vector<double> xi, xprime;
        CoupledPair pair;
        pair.x.resize(n);
        pair.x_u.resize(n);
        for (std::size_t i = begin; i < end; ++i) {
            sample_path(model.covariance, rs, xi, pair.x.data());
            gs.z[i] = evaluate(fn, model, pair.x.data()) - mu;
            if (fn.uses_coupling()) {
                // Stratum index cycles with the global draw index so the
                // allocation is balanced and scheduling-independent.
                pair.u = rs.exponential_stratified(static_cast<std::uint32_t>(i % strata), strata);
                mehler_shift(model.covariance, rs, pair.u, pair.x.data(), xi, xprime,
                             pair.x_u.data());
                gs.v[i] = mehler_inner(fn, model, pair);
            } else {
                gs.v[i] = quadratic_g_exact(model, pair.x.data());
            }
        }
    });
    return gs;
}

double GEstimate::ghat_at(double z) const {
    if (z <= grid.front()) return ghat.front();
    if (z >= grid.back()) return ghat.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), z);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double t = (z - grid[i]) / (grid[i + 1] - grid[i]);
    return ghat[i] + t * (ghat[i + 1] - ghat[i]);
}

double GEstimate::se_at(double z) const {
    if (z <= grid.front()) return se.front();
    if (z >= grid.back()) return se.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), z);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double t = (z - grid[i]) / (grid[i + 1] - grid[i]);
    return se[i] + t * (se[i + 1] - se[i]);
}

GEstimate regress_g(const GSamples& samples, const std::vector<double>& grid, double var_z,
                    double bandwidth, Exec exec) {
    const std::size_t n = samples.z.size();
    if (n < 2) throw DomainError("regress_g: need at least 2 samples");
    if (grid.size() < 2) throw DomainError("regress_g: need at least 2 grid points");
    if (!(var_z > 0.0)) throw DomainError("regress_g: var_z must be positive");
    GEstimate est;
    est.grid = grid;
    est.count = n;
    if (bandwidth == 0.0) {
        const MomentSummary m = moments(samples.z);
        est.bandwidth = silverman_bandwidth(std::sqrt(m.var), n);
    } else if (bandwidth > 0.0) {
        est.bandwidth = bandwidth;
    } else {
        throw DomainError("regress_g: bandwidth must be positive (or 0 for automatic)");
    }
    est.clamp_floor = 1e-6 * var_z;
    const std::size_t m = grid.size();
    est.ghat.assign(m, 0.0);
    est.se.assign(m, 0.0);
    est.n_eff.assign(m, 0.0);
    est.flagged.assign(m, 0);
    std::vector<std::uint8_t> clamped(m, 0);
    const double h = est.bandwidth;
    const double* zs = samples.z.data();
    const double* vs = samples.v.data();
    run_per_index(m, exec, [&](std::size_t j) {
        const double q = grid[j];
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (zs[i] - q) / h;
            // exp underflows anyway past |t| ~ 38; skipping keeps it cheap
            // and exactly reproducible.
            if (t > 38.0 || t < -38.0) continue;
            const double w = std::exp(-0.5 * t * t);
            const double wv = w * vs[i];
            s0 += w;
            s1 += wv;
            s2 += w * w;
            s3 += w * wv;
            s4 += wv * wv;
        }
        if (s0 <= 0.0 || s2 <= 0.0) {
            est.ghat[j] = est.clamp_floor;
            est.se[j] = 0.0;
            est.n_eff[j] = 0.0;
            est.flagged[j] = 1;
            clamped[j] = 1;
            return;
        }
        double g = s1 / s0;
        est.n_eff[j] = s0 * s0 / s2;
        const double ssq = std::max(0.0, s4 - 2.0 * g * s3 + g * g * s2);
        est.se[j] = std::sqrt(ssq) / s0;
        if (g < est.clamp_floor) {
            g = est.clamp_floor;
            clamped[j] = 1;
        }
        est.ghat[j] = g;
        if (est.n_eff[j] < min_effective_count) est.flagged[j] = 1;
    });
    est.clamp_events = std::accumulate(clamped.begin(), clamped.end(), std::size_t{0});
    est.flagged_count =
        std::accumulate(est.flagged.begin(), est.flagged.end(), std::size_t{0});
    return est;
}

GEstimate regress_g_knn(const GSamples& samples, const std::vector<double>& grid, double var_z) {
    const std::size_t n = samples.z.size();
    if (n < 2) throw DomainError("regress_g_knn: need at least 2 samples");
    if (!(var_z > 0.0)) throw DomainError("regress_g_knn: var_z must be positive");
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples.z[a] < samples.z[b]; });
    std::vector<double> zs(n), vsum(n + 1, 0.0), vsqsum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) zs[i] = samples.z[order[i]];
    for (std::size_t i = 0; i < n; ++i) {
        const double v = samples.v[order[i]];
        vsum[i + 1] = vsum[i] + v;
        vsqsum[i + 1] = vsqsum[i] + v * v;
    }
    GEstimate est;
    est.grid = grid;
    est.count = n;
    est.bandwidth = 0.0; // window is adaptive
    est.clamp_floor = 1e-6 * var_z;
    const std::size_t m = grid.size();
    est.ghat.assign(m, 0.0);
    est.se.assign(m, 0.0);
    est.n_eff.assign(m, static_cast<double>(k));
    est.flagged.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        const double q = grid[j];
        // Slide the k-window to the k nearest neighbours of q: the best
        // window minimises the distance to its farthest member.
        const std::size_t pos = static_cast<std::size_t>(
            std::lower_bound(zs.begin(), zs.end(), q) - zs.begin());
        const std::size_t lo = pos > k ? pos - k : 0;
        std::size_t best = std::min(n - k, lo);
        double best_width = 0.0;
        bool first = true;
        for (std::size_t s = lo; s + k <= n && s <= pos; ++s) {
            const double left = std::max(0.0, q - zs[s]);
            const double right = std::max(0.0, zs[s + k - 1] - q);
            const double width = std::max(left, right);
            if (first || width < best_width) {
                best = s;
                best_width = width;
                first = false;
            }
        }
        const double sum = vsum[best + k] - vsum[best];
        const double sq = vsqsum[best + k] - vsqsum[best];
        double g = sum / static_cast<double>(k);
        const double var_w =
            std::max(0.0, sq / static_cast<double>(k) - g * g);
        est.se[j] = std::sqrt(var_w / static_cast<double>(k));
        if (g < est.clamp_floor) {
            g = est.clamp_floor;
            ++est.clamp_events;
        }
        est.ghat[j] = g;
        if (static_cast<double>(k) < min_effective_count) est.flagged[j] = 1;
    }
    est.flagged_count =
        std::accumulate(est.flagged.begin(), est.flagged.end(), std::size_t{0});
    return est;
}

std::pair<double, double> g_range(const GEstimate& est, double q) {
    if (!(q >= 0.0 && q < 0.5)) throw DomainError("g_range: quantile must be in [0, 0.5)");
    std::vector<double> vals;
    vals.reserve(est.ghat.size());
    for (std::size_t j = 0; j < est.ghat.size(); ++j)
        if (!est.flagged[j]) vals.push_back(est.ghat[j]);
    if (vals.empty()) throw DomainError("g_range: every grid point is flagged");
    std::sort(vals.begin(), vals.end());
    return {quantile_sorted(vals, q), quantile_sorted(vals, 1.0 - q)};
}

} // namespace gdens
