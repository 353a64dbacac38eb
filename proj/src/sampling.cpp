#include "gdens/sampling.hpp"

#include <cmath>

#include "gdens/parallel.hpp"

namespace gdens {

void sample_path(const CovarianceMatrix& k, RandomStream& rs, std::vector<double>& xi,
                 double* x) {
    xi.resize(k.dim());
    rs.fill_normal(xi.data(), xi.size());
    k.transform(xi.data(), x);
}

void mehler_shift(const CovarianceMatrix& k, RandomStream& rs, double u, const double* x,
                  std::vector<double>& xi, std::vector<double>& xprime, double* x_u) {
    if (u < 0.0) throw DomainError("mehler_shift: u must be >= 0");
    xprime.resize(k.dim());
    sample_path(k, rs, xi, xprime.data());
    const double a = std::exp(-u);
    const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
    for (std::size_t i = 0; i < k.dim(); ++i) x_u[i] = a * x[i] + b * xprime[i];
}

CoupledPair sample_coupled_at(const GaussianModel& model, RandomStream& rs, double u) {
    CoupledPair p;
    p.u = u;
    p.x.resize(model.dim());
    p.x_u.resize(model.dim());
    std::vector<double> xi, xprime;
    sample_path(model.covariance, rs, xi, p.x.data());
    mehler_shift(model.covariance, rs, u, p.x.data(), xi, xprime, p.x_u.data());
    return p;
}

CoupledPair sample_coupled(const GaussianModel& model, RandomStream& rs) {
    // u is drawn before the second path so the stream layout per draw is
    // fixed: dim normals, one exponential, dim normals.
    CoupledPair p;
    p.x.resize(model.dim());
    p.x_u.resize(model.dim());
    std::vector<double> xi, xprime;
    sample_path(model.covariance, rs, xi, p.x.data());
    p.u = rs.exponential();
    mehler_shift(model.covariance, rs, p.u, p.x.data(), xi, xprime, p.x_u.data());
    return p;
}

std::vector<double> sample_batch(const GaussianModel& model, std::size_t count,
                                 std::uint64_t seed, Exec exec) {
    const std::size_t n = model.dim();
    std::vector<double> out(count * n);
    run_chunked(count, exec, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RandomStream rs(seed, chunk);
        std::vector<double> xi;
        for (std::size_t i = begin; i < end; ++i)
            sample_path(model.covariance, rs, xi, &out[i * n]);
    });
    return out;
}

} // namespace gdens
