#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gdens/covariance.hpp"
#include "gdens/sampling.hpp"
#include "gdens/stats.hpp"

using namespace gdens;

namespace {

GaussianModel small_fbm() {
    return build_fbm_model(ProcessGrid::trapezoid(linspace(1.0, 2.0, 24)), 0.75);
}

} // namespace

TEST_CASE("serial and parallel batches are bitwise identical") {
    const GaussianModel model = small_fbm();
    const std::vector<double> a = sample_batch(model, 5000, 123, Exec::Serial);
    const std::vector<double> b = sample_batch(model, 5000, 123, Exec::Parallel);
    REQUIRE(a.size() == b.size());
    CHECK(a == b);
}

TEST_CASE("batch draws have the model covariance") {
    const GaussianModel model = small_fbm();
    const std::size_t n = 60000, d = model.dim();
    const std::vector<double> x = sample_batch(model, n, 7);
    // Check a handful of second moments against K.
    const std::vector<std::pair<std::size_t, std::size_t>> probes = {
        {0, 0}, {0, d - 1}, {d / 2, d / 2}, {d / 2, d - 1}};
    for (auto [i, j] : probes) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += x[r * d + i] * x[r * d + j];
        acc /= static_cast<double>(n);
        const double kij = model.covariance.at(i, j);
        // se of the product moment is about sqrt((Kii Kjj + Kij^2)/n)
        const double se = std::sqrt((model.covariance.at(i, i) * model.covariance.at(j, j) +
                                     kij * kij) /
                                    static_cast<double>(n));
        CHECK(std::abs(acc - kij) < 4.5 * se);
    }
}

TEST_CASE("coupling at u = 0 reproduces the path exactly") {
    const GaussianModel model = small_fbm();
    RandomStream rs(9, 0);
    const CoupledPair p = sample_coupled_at(model, rs, 0.0);
    CHECK(p.x == p.x_u);
}

TEST_CASE("coupling correlation is exp(-u) coordinatewise") {
    const GaussianModel model = build_model(CovarianceMatrix::build(1, {1.0}));
    const double u = 0.7;
    RandomStream rs(31, 0);
    const std::size_t n = 200000;
    double cross = 0.0, var_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const CoupledPair p = sample_coupled_at(model, rs, u);
        cross += p.x[0] * p.x_u[0];
        var_u += p.x_u[0] * p.x_u[0];
    }
    cross /= static_cast<double>(n);
    var_u /= static_cast<double>(n);
    CHECK(std::abs(cross - std::exp(-u)) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(var_u - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("coupled marginal matches the path marginal (two-sample KS)") {
    const GaussianModel model = build_model(CovarianceMatrix::build(1, {1.0}));
    RandomStream rs(77, 0);
    const std::size_t n = 20000;
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CoupledPair p = sample_coupled(model, rs);
        xs.push_back(p.x[0]);
        ys.push_back(p.x_u[0]);
    }
    const double d = ks_statistic(xs, ys);
    // 1% two-sample critical value: 1.6276 * sqrt((n + m) / (n m)).
    CHECK(d < 1.6276 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("coupling times are Exp(1) on average") {
    const GaussianModel model = build_model(CovarianceMatrix::build(1, {1.0}));
    RandomStream rs(5, 4);
    const std::size_t n = 100000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += sample_coupled(model, rs).u;
    CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}
