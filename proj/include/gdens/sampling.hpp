#pragma once

#include <cstdint>
#include <vector>

#include "gdens/common.hpp"
#include "gdens/covariance.hpp"
#include "gdens/rng.hpp"

namespace gdens {

// One draw of the Ornstein-Uhlenbeck coupling: x_u = e^{-u} x +
// sqrt(1 - e^{-2u}) x' with x' an independent copy.  u = 0 reproduces x
// exactly; u -> infinity gives an independent draw.
struct CoupledPair {
    double u = 0.0;
    std::vector<double> x;
    std::vector<double> x_u;
};

// Draws x = L xi with xi fresh standard normals; xi is scratch space so the
// caller can reuse allocations inside chunk loops.
void sample_path(const CovarianceMatrix& k, RandomStream& rs, std::vector<double>& xi, double* x);

// Fills x_u from an existing x using a fresh independent x'; consumes
// exactly dim normals from the stream.
void mehler_shift(const CovarianceMatrix& k, RandomStream& rs, double u, const double* x,
                  std::vector<double>& xi, std::vector<double>& xprime, double* x_u);

CoupledPair sample_coupled(const GaussianModel& model, RandomStream& rs);

// Same but with the coupling time forced (tests of the u = 0 identity and
// of the e^{-u} correlation law).
CoupledPair sample_coupled_at(const GaussianModel& model, RandomStream& rs, double u);

// count draws, row-major count x dim; chunked and bitwise-deterministic in
// (seed, count) regardless of execution policy.
std::vector<double> sample_batch(const GaussianModel& model, std::size_t count,
                                 std::uint64_t seed, Exec exec = Exec::Parallel);

} // namespace gdens
