#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gdens/functionals.hpp"
#include "gdens/stats.hpp"

using namespace gdens;

TEST_CASE("linear monotone function") {
    const MonotoneFn f = MonotoneFn::linear(0.7);
    CHECK(f.value(2.0) == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(f.deriv(-3.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(f.deriv_min() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(f.deriv_max() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_THROWS_AS(MonotoneFn::linear(-0.1), DomainError);
}

TEST_CASE("sigmoid blend has derivative strictly inside [lo, hi]") {
    const MonotoneFn f = MonotoneFn::sigmoid_blend(0.5, 1.5);
    CHECK(f.deriv_min() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.deriv_max() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(f.value(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.deriv(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : {-20.0, -1.0, 0.3, 4.0, 25.0}) {
        CHECK(f.deriv(x) > 0.5);
        CHECK(f.deriv(x) < 1.5);
    }
    // Finite-difference agreement.
    const double h = 1e-6;
    for (double x : {-2.0, 0.0, 1.7})
        CHECK(f.deriv(x) ==
              doctest::Approx((f.value(x + h) - f.value(x - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("tabulated monotone function interpolates and extrapolates by end slopes") {
    const MonotoneFn f = MonotoneFn::tabulated({0.0, 1.0, 3.0}, {0.0, 2.0, 3.0});
    CHECK(f.value(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.value(2.0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(f.value(-1.0) == doctest::Approx(-2.0).epsilon(1e-15)); // slope 2 below
    CHECK(f.value(4.0) == doctest::Approx(3.5).epsilon(1e-15));   // slope 1/2 above
    CHECK(f.deriv_min() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.deriv_max() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(MonotoneFn::tabulated({0.0, 1.0}, {1.0, 0.0}), DomainError);
}

TEST_CASE("functional evaluation: max, sup, integral, quadratic") {
    const GaussianModel vec = build_model(CovarianceMatrix::build(2, {1.0, 0.5, 0.5, 1.0}));
    const double path2[] = {0.3, -1.2};
    CHECK(evaluate(Functional::vector_max(), vec, path2) ==
          doctest::Approx(0.3).epsilon(1e-15));

    const GaussianModel proc =
        build_fbm_model(ProcessGrid::midpoint_cells(1.0, 4), 0.5);
    const double path4[] = {-0.5, 2.0, 1.0, 1.5};
    CHECK(evaluate(Functional::process_sup(), proc, path4) ==
          doctest::Approx(2.0).epsilon(1e-15));

    // Integral with f = identity: sum w x, weights are 1/4 each.
    const Functional integ = Functional::monotone_integral(MonotoneFn::linear(1.0));
    CHECK(evaluate(integ, proc, path4) == doctest::Approx(1.0).epsilon(1e-14));

    // Quadratic: sum w x^2.
    const double expected = 0.25 * (0.25 + 4.0 + 1.0 + 2.25);
    CHECK(evaluate(Functional::fbm_quadratic(), proc, path4) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("argmax takes the first maximal coordinate") {
    const double x[] = {1.0, 3.0, 3.0, -2.0};
    CHECK(argmax_index(x, 4) == 1);
}

TEST_CASE("max-type coupled integrand picks the covariance at the two argmaxes") {
    const GaussianModel vec = build_model(CovarianceMatrix::build(2, {1.0, 0.5, 0.5, 1.0}));
    CoupledPair pair;
    pair.u = 0.4;
    pair.x = {2.0, 0.1};   // argmax 0
    pair.x_u = {-1.0, 0.3}; // argmax 1
    CHECK(mehler_inner(Functional::vector_max(), vec, pair) ==
          doctest::Approx(0.5).epsilon(1e-15));
    pair.x_u = {0.9, 0.3}; // argmax 0
    CHECK(mehler_inner(Functional::vector_max(), vec, pair) ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integral coupled integrand is the weighted bilinear form") {
    const GaussianModel proc =
        build_fbm_model(ProcessGrid::midpoint_cells(1.0, 3), 0.5);
    const Functional fn = Functional::monotone_integral(MonotoneFn::linear(2.0));
    CoupledPair pair;
    pair.u = 0.2;
    pair.x = {0.5, -0.1, 0.8};
    pair.x_u = {-0.2, 0.4, 0.1};
    // a_i = w_i f'(x_i) = (1/3) * 2, likewise b; v = a^T K b.
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            expect += (2.0 / 3.0) * (2.0 / 3.0) * proc.covariance.at(i, j);
    CHECK(mehler_inner(fn, proc, pair) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("quadratic integrand is exact on a constant path") {
    // H = 1/2 on 4 midpoint cells of [0,1]: sum_ij w_i w_j min(t_i, t_j)
    // equals 0.34375 exactly, so v = 2 c^2 * 0.34375.
    const GaussianModel proc =
        build_fbm_model(ProcessGrid::midpoint_cells(1.0, 4), 0.5);
    const std::vector<double> path(4, 1.0);
    CHECK(quadratic_g_exact(proc, path.data()) ==
          doctest::Approx(0.6875).epsilon(1e-14));
    const std::vector<double> path2(4, 2.0);
    CHECK(quadratic_g_exact(proc, path2.data()) ==
          doctest::Approx(4.0 * 0.6875).epsilon(1e-14));

    CoupledPair pair;
    pair.x = path;
    pair.x_u = path;
    CHECK_THROWS_AS(mehler_inner(Functional::fbm_quadratic(), proc, pair), DomainError);
}

TEST_CASE("centering of the 1-d Gaussian matches closed forms") {
    const GaussianModel m = build_model(CovarianceMatrix::build(1, {1.0}));
    const Centering c =
        center_and_absmean(Functional::vector_max(), m, 150000, subseed(4, 1));
    CHECK(std::abs(c.mu) < 4.0 * c.mu_se);
    CHECK(std::abs(c.abs_mean - 0.7978845608028654) < 4.0 * c.abs_mean_se);
    CHECK(std::abs(c.var - 1.0) < 4.0 * c.var_se);
    CHECK(c.count == 150000);
}

TEST_CASE("centering of the independent bivariate max matches 1/sqrt(pi)") {
    const GaussianModel m = build_model(CovarianceMatrix::build(2, {1.0, 0.0, 0.0, 1.0}));
    const Centering c =
        center_and_absmean(Functional::vector_max(), m, 150000, subseed(8, 1));
    CHECK(std::abs(c.mu - 0.5641895835477563) < 4.0 * c.mu_se);
    CHECK(std::abs(c.abs_mean - 0.6574161082212239) < 4.0 * c.abs_mean_se);
}

TEST_CASE("sigma bounds per functional") {
    const GaussianModel corr = build_model(CovarianceMatrix::build(2, {1.0, 0.5, 0.5, 1.0}));
    const SigmaBounds sb = sigma_bounds(corr, Functional::vector_max());
    CHECK(sb.sigma_min_sq == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sb.sigma_max_sq == doctest::Approx(1.0).epsilon(1e-15));

    const GaussianModel sup =
        build_fbm_model(ProcessGrid::trapezoid(linspace(1.0, 2.0, 48)), 0.75);
    const SigmaBounds ss = sigma_bounds(sup, Functional::process_sup());
    CHECK(ss.sigma_min_sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ss.sigma_max_sq == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));

    // Monotone integral: (f'_min^2 S, f'_max^2 S), S = sum w_i w_j K_ij.
    const GaussianModel brown =
        build_fbm_model(ProcessGrid::trapezoid(linspace(0.25, 1.25, 32)), 0.5);
    const Functional integ =
        Functional::monotone_integral(MonotoneFn::sigmoid_blend(0.5, 1.5));
    double S = 0.0;
    for (std::size_t i = 0; i < brown.dim(); ++i)
        for (std::size_t j = 0; j < brown.dim(); ++j)
            S += brown.grid.weights[i] * brown.grid.weights[j] * brown.covariance.at(i, j);
    const SigmaBounds si = sigma_bounds(brown, integ);
    CHECK(si.sigma_min_sq == doctest::Approx(0.25 * S).epsilon(1e-12));
    CHECK(si.sigma_max_sq == doctest::Approx(2.25 * S).epsilon(1e-12));

    // Degenerate cases.
    const GaussianModel indep = build_model(CovarianceMatrix::build(2, {1.0, 0.0, 0.0, 1.0}));
    CHECK_THROWS_AS(sigma_bounds(indep, Functional::vector_max()), DegenerateEnvelope);
    CHECK_THROWS_AS(sigma_bounds(brown, Functional::fbm_quadratic()), DegenerateEnvelope);
    const GaussianModel neg = build_tabulated_model(ProcessGrid::trapezoid({1.0, 2.0}),
                                                    {1.0, -0.5, -0.5, 1.0});
    const Functional ineg = Functional::monotone_integral(MonotoneFn::linear(1.0));
    CHECK_THROWS_AS(sigma_bounds(neg, ineg), DegenerateEnvelope);
}

TEST_CASE("variance identity for the quadratic functional") {
    // E v = 2 sum_ij w_i w_j K_ij^2 = Var(Z) exactly; check the Monte Carlo
    // mean of the exact integrand against the closed form.
    const GaussianModel proc =
        build_fbm_model(ProcessGrid::midpoint_cells(1.0, 16), 0.5);
    double var_closed = 0.0;
    for (std::size_t i = 0; i < proc.dim(); ++i)
        for (std::size_t j = 0; j < proc.dim(); ++j) {
            const double k = proc.covariance.at(i, j);
            var_closed +=
                2.0 * proc.grid.weights[i] * proc.grid.weights[j] * k * k;
        }
    const Centering c =
        center_and_absmean(Functional::fbm_quadratic(), proc, 120000, subseed(3, 1));
    CHECK(std::abs(c.var - var_closed) < 4.0 * c.var_se);
}
