// Compares the serial and parallel execution paths of the Monte Carlo
// kernels and verifies that they produce bitwise-identical results.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "gdens/covariance.hpp"
#include "gdens/functionals.hpp"
#include "gdens/g_estimator.hpp"
#include "gdens/harness.hpp"
#include "gdens/parallel.hpp"
#include "gdens/sampling.hpp"

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Row {
    const char* name;
    double serial_s;
    double parallel_s;
    bool identical;
};

void print_rows(const std::vector<Row>& rows) {
    std::printf("%-28s %10s %10s %9s %10s\n", "kernel", "serial(s)", "parallel", "speedup",
                "identical");
    for (const Row& r : rows)
        std::printf("%-28s %10.3f %10.3f %8.2fx %10s\n", r.name, r.serial_s, r.parallel_s,
                    r.serial_s / r.parallel_s, r.identical ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    std::size_t draws = 20000;
    std::size_t reg_n = 200000;
    if (argc > 1) draws = static_cast<std::size_t>(std::stoull(argv[1]));
    if (argc > 2) reg_n = static_cast<std::size_t>(std::stoull(argv[2]));
    std::printf("threads available: %d   draws: %zu   regression points: %zu\n",
                gdens::max_threads(), draws, reg_n);

    const gdens::GaussianModel model =
        gdens::build_fbm_model(gdens::ProcessGrid::trapezoid(gdens::linspace(1.0, 2.0, 256)),
                               0.75);
    const gdens::Functional fn = gdens::Functional::process_sup();
    std::vector<Row> rows;

    {
        double t0 = now_seconds();
        const std::vector<double> a = gdens::sample_batch(model, draws, 7, gdens::Exec::Serial);
        double t1 = now_seconds();
        const std::vector<double> b =
            gdens::sample_batch(model, draws, 7, gdens::Exec::Parallel);
        double t2 = now_seconds();
        rows.push_back({"path sampling (256-d)", t1 - t0, t2 - t1, same_bits(a, b)});
    }

    gdens::Centering centering;
    {
        gdens::Functional warm = fn;
        centering = gdens::center_and_absmean(warm, model, draws, 11, gdens::Exec::Parallel);
        warm.centering = centering;
        double t0 = now_seconds();
        const gdens::GSamples a =
            gdens::draw_g_samples(warm, model, centering, draws, 13, 1, gdens::Exec::Serial);
        double t1 = now_seconds();
        const gdens::GSamples b =
            gdens::draw_g_samples(warm, model, centering, draws, 13, 1, gdens::Exec::Parallel);
        double t2 = now_seconds();
        rows.push_back({"coupled g draws (sup)", t1 - t0, t2 - t1,
                        same_bits(a.z, b.z) && same_bits(a.v, b.v)});
    }

    {
        gdens::GSamples s;
        s.z.resize(reg_n);
        s.v.resize(reg_n);
        gdens::RandomStream rs(99, 0);
        for (std::size_t i = 0; i < reg_n; ++i) {
            s.z[i] = rs.normal();
            s.v[i] = 1.0 + 0.1 * rs.normal();
        }
        const std::vector<double> grid = gdens::linspace(-3.0, 3.0, 401);
        double t0 = now_seconds();
        const gdens::GEstimate a = gdens::regress_g(s, grid, 1.0, 0.0, gdens::Exec::Serial);
        double t1 = now_seconds();
        const gdens::GEstimate b = gdens::regress_g(s, grid, 1.0, 0.0, gdens::Exec::Parallel);
        double t2 = now_seconds();
        rows.push_back(
            {"kernel regression (401 pts)", t1 - t0, t2 - t1, same_bits(a.ghat, b.ghat)});

        double t3 = now_seconds();
        const gdens::KdeCurve ka = gdens::kde_density(s.z, grid, 0.0, gdens::Exec::Serial);
        double t4 = now_seconds();
        const gdens::KdeCurve kb = gdens::kde_density(s.z, grid, 0.0, gdens::Exec::Parallel);
        double t5 = now_seconds();
        rows.push_back(
            {"kde (401 pts)", t4 - t3, t5 - t4, same_bits(ka.density, kb.density)});
    }

    print_rows(rows);
    bool all_same = true;
    for (const Row& r : rows) all_same = all_same && r.identical;
    if (!all_same) {
        std::printf("determinism violated: serial and parallel outputs differ\n");
        return 1;
    }
    return 0;
}
