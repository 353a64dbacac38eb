#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gdens/rng.hpp"
#include "gdens/stats.hpp"

using namespace gdens;

TEST_CASE("streams are deterministic in (seed, chunk)") {
    RandomStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct chunks give distinct streams") {
    RandomStream a(42, 0), b(42, 1), c(43, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 256; ++i) {
        const std::uint64_t x = a.next_u64();
        if (x == b.next_u64()) ++equal_ab;
        if (x == c.next_u64()) ++equal_ac;
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
}

TEST_CASE("subseed is deterministic and separates domains") {
    CHECK(subseed(99, 1) == subseed(99, 1));
    CHECK(subseed(99, 1) != subseed(99, 2));
    CHECK(subseed(99, 1) != 99);
}

TEST_CASE("uniform01 lies in [0,1) with the right first moments") {
    RandomStream rs(7, 0);
    const std::size_t n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rs.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal deviates have standard moments and finite tails") {
    RandomStream rs(11, 3);
    const std::size_t n = 200000;
    std::vector<double> x(n);
    rs.fill_normal(x.data(), n);
    const MomentSummary m = moments(x);
    CHECK(std::abs(m.mean) < 4.0 * m.mean_se);
    CHECK(std::abs(m.var - 1.0) < 4.0 * m.var_se);
    double m4 = 0.0;
    for (double v : x) m4 += v * v * v * v;
    m4 /= static_cast<double>(n);
    CHECK(std::abs(m4 - 3.0) < 0.12); // kurtosis of the normal law
}

TEST_CASE("normal spare caching is part of the deterministic stream") {
    RandomStream a(5, 0), b(5, 0);
    std::vector<double> xa(101), xb(101);
    a.fill_normal(xa.data(), 101);
    for (int i = 0; i < 101; ++i) xb[static_cast<std::size_t>(i)] = b.normal();
    CHECK(xa == xb);
}

TEST_CASE("exponential has unit mean") {
    RandomStream rs(13, 2);
    const std::size_t n = 200000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = rs.exponential();
        REQUIRE(e >= 0.0);
        sum += e;
    }
    CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("stratified exponential respects stratum quantile bands") {
    RandomStream rs(17, 0);
    const std::uint32_t strata = 8;
    for (std::uint32_t k = 0; k < strata; ++k) {
        const double lo = -std::log1p(-static_cast<double>(k) / strata);
        const double hi = k + 1 == strata
                              ? std::numeric_limits<double>::infinity()
                              : -std::log1p(-static_cast<double>(k + 1) / strata);
        for (int rep = 0; rep < 2000; ++rep) {
            const double u = rs.exponential_stratified(k, strata);
            REQUIRE(u >= lo);
            REQUIRE(u < hi);
        }
    }
}

TEST_CASE("stratified exponential with one stratum matches Exp(1) law") {
    RandomStream a(21, 0);
    const std::size_t n = 100000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a.exponential_stratified(0, 1);
    CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}
