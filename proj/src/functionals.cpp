#include "gdens/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "gdens/parallel.hpp"
#include "gdens/stats.hpp"

namespace gdens {

namespace {

double softplus(double x) {
    // log(1 + e^x) without overflow.
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace

MonotoneFn MonotoneFn::linear(double slope) {
    if (slope < 0.0) throw DomainError("monotone integrand: slope must be >= 0");
    MonotoneFn f;
    f.kind_ = Kind::Linear;
    f.lo_ = f.hi_ = slope;
    f.deriv_min_ = f.deriv_max_ = slope;
    f.describe_ = "linear";
    return f;
}

MonotoneFn MonotoneFn::sigmoid_blend(double lo, double hi) {
    if (lo < 0.0 || !(hi > lo)) throw DomainError("monotone integrand: need 0 <= lo < hi");
    MonotoneFn f;
    f.kind_ = Kind::Sigmoid;
    f.lo_ = lo;
    f.hi_ = hi;
    f.deriv_min_ = lo;
    f.deriv_max_ = hi;
    f.describe_ = "sigmoid";
    return f;
}

MonotoneFn MonotoneFn::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw DomainError("monotone integrand: need >= 2 matching knots");
    MonotoneFn f;
    f.kind_ = Kind::Tabulated;
    f.slopes_.resize(xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i + 1] > xs[i])) throw DomainError("monotone integrand: knots must increase");
        f.slopes_[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if (f.slopes_[i] < 0.0) throw DomainError("monotone integrand: table must be nondecreasing");
    }
    f.deriv_min_ = *std::min_element(f.slopes_.begin(), f.slopes_.end());
    f.deriv_max_ = *std::max_element(f.slopes_.begin(), f.slopes_.end());
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    f.describe_ = "tabulated";
    return f;
}

double MonotoneFn::value(double x) const {
    switch (kind_) {
    case Kind::Linear:
        return lo_ * x;
    case Kind::Sigmoid:
        return lo_ * x + (hi_ - lo_) * (softplus(x) - std::log(2.0));
    case Kind::Tabulated: {
        if (x <= xs_.front()) return ys_.front() + slopes_.front() * (x - xs_.front());
        if (x >= xs_.back()) return ys_.back() + slopes_.back() * (x - xs_.back());
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
        return ys_[i] + slopes_[i] * (x - xs_[i]);
    }
    }
    return 0.0;
}

double MonotoneFn::deriv(double x) const {
    switch (kind_) {
    case Kind::Linear:
        return lo_;
    case Kind::Sigmoid:
        return lo_ + (hi_ - lo_) / (1.0 + std::exp(-x));
    case Kind::Tabulated: {
        if (x <= xs_.front()) return slopes_.front();
        if (x >= xs_.back()) return slopes_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        return slopes_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }
    }
    return 0.0;
}

Functional Functional::vector_max() {
    Functional fn;
    fn.kind = FunctionalKind::VectorMax;
    return fn;
}

Functional Functional::process_sup() {
    Functional fn;
    fn.kind = FunctionalKind::ProcessSup;
    return fn;
}

Functional Functional::monotone_integral(MonotoneFn f) {
    Functional fn;
    fn.kind = FunctionalKind::MonotoneIntegral;
    fn.f = std::move(f);
    return fn;
}

Functional Functional::fbm_quadratic() {
    Functional fn;
    fn.kind = FunctionalKind::FbmQuadratic;
    return fn;
}

const char* Functional::name() const {
    switch (kind) {
    case FunctionalKind::VectorMax:
        return "vector_max";
    case FunctionalKind::ProcessSup:
        return "process_sup";
    case FunctionalKind::MonotoneIntegral:
        return "monotone_integral";
    case FunctionalKind::FbmQuadratic:
        return "fbm_quadratic";
    }
    return "?";
}

std::size_t argmax_index(const double* x, std::size_t n) {
    if (n == 0) throw DomainError("argmax_index of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > x[best]) best = i;
    return best;
}

namespace {

void require_grid(const Functional& fn, const GaussianModel& model) {
    if (fn.needs_grid() && !model.has_grid())
        throw DomainError(std::string(fn.name()) + " requires a model with a time grid");
}

} // namespace

double evaluate(const Functional& fn, const GaussianModel& model, const double* path) {
    require_grid(fn, model);
    const std::size_t n = model.dim();
    switch (fn.kind) {
    case FunctionalKind::VectorMax:
    case FunctionalKind::ProcessSup:
        return *std::max_element(path, path + n);
    case FunctionalKind::MonotoneIntegral: {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += model.grid.weights[k] * fn.f.value(path[k]);
        return s;
    }
    case FunctionalKind::FbmQuadratic: {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += model.grid.weights[k] * path[k] * path[k];
        return s;
    }
    }
    return 0.0;
}

double mehler_inner(const Functional& fn, const GaussianModel& model, const CoupledPair& pair) {
    require_grid(fn, model);
    const std::size_t n = model.dim();
    if (pair.x.size() != n || pair.x_u.size() != n)
        throw DomainError("mehler_inner: coupled pair does not match model dimension");
    switch (fn.kind) {
    case FunctionalKind::VectorMax:
    case FunctionalKind::ProcessSup: {
        const std::size_t i0 = argmax_index(pair.x.data(), n);
        const std::size_t iu = argmax_index(pair.x_u.data(), n);
        return model.covariance.at(i0, iu);
    }
    case FunctionalKind::MonotoneIntegral: {
        const double lo = fn.f.deriv_min() - 1e-12;
        const double hi = fn.f.deriv_max() + 1e-12;
        std::vector<double> a(n), b(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double da = fn.f.deriv(pair.x[k]);
            const double db = fn.f.deriv(pair.x_u[k]);
            if (da < lo || da > hi || db < lo || db > hi)
                throw DomainError("monotone integrand: derivative left its declared bounds");
            a[k] = model.grid.weights[k] * da;
            b[k] = model.grid.weights[k] * db;
        }
        const std::vector<double>& k = model.covariance.entries();
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = &k[i * n];
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * b[j];
            v += a[i] * s;
        }
        return v;
    }
    case FunctionalKind::FbmQuadratic:
        throw DomainError("mehler_inner: quadratic functional has an exact integrand; "
                          "use quadratic_g_exact");
    }
    return 0.0;
}

double quadratic_g_exact(const GaussianModel& model, const double* path) {
    if (!model.has_grid()) throw DomainError("quadratic_g_exact requires a time grid");
    const std::size_t n = model.dim();
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = model.grid.weights[k] * path[k];
    const std::vector<double>& k = model.covariance.entries();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &k[i * n];
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * q[j];
        v += q[i] * s;
    }
    return 2.0 * v;
}

Centering center_and_absmean(const Functional& fn, const GaussianModel& model, std::size_t count,
                             std::uint64_t seed, Exec exec) {
    require_grid(fn, model);
    if (count < 2) throw DomainError("center_and_absmean: need at least 2 draws");
    std::vector<double> raw(count);
    run_chunked(count, exec, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RandomStream rs(seed, chunk);
        std::vector<double> xi, x(model.dim());
        for (std::size_t i = begin; i < end; ++i) {
            sample_path(model.covariance, rs, xi, x.data());
            raw[i] = evaluate(fn, model, x.data());
        }
    });
    const MomentSummary m = moments(raw);
    std::vector<double> absdev(count);
    for (std::size_t i = 0; i < count; ++i) absdev[i] = std::abs(raw[i] - m.mean);
    const MomentSummary ma = moments(absdev);
    Centering c;
    c.count = count;
    c.seed = seed;
    c.mu = m.mean;
    c.var = m.var;
    c.mu_se = m.mean_se;
    c.var_se = m.var_se;
    c.abs_mean = ma.mean;
    c.abs_mean_se = ma.mean_se;
    return c;
}

SigmaBounds sigma_bounds(const GaussianModel& model, const Functional& fn) {
    require_grid(fn, model);
    if (model.degenerate_grid)
        throw DegenerateEnvelope("sigma_bounds: model has numerically duplicate grid points");
    SigmaBounds b;
    switch (fn.kind) {
    case FunctionalKind::VectorMax:
    case FunctionalKind::ProcessSup:
        // Conditional variance of a max / grid sup is squeezed between the
        // smallest covariance entry and the largest marginal variance.
        b.sigma_min_sq = model.covariance.min_entry();
        b.sigma_max_sq = model.covariance.max_diagonal();
        break;
    case FunctionalKind::MonotoneIntegral: {
        if (model.covariance.min_entry() < 0.0)
            throw DegenerateEnvelope("sigma_bounds: monotone integral needs a nonnegative kernel");
        const std::size_t n = model.dim();
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s += model.grid.weights[i] * model.grid.weights[j] * model.covariance.at(i, j);
        b.sigma_min_sq = fn.f.deriv_min() * fn.f.deriv_min() * s;
        b.sigma_max_sq = fn.f.deriv_max() * fn.f.deriv_max() * s;
        break;
    }
    case FunctionalKind::FbmQuadratic:
        throw DegenerateEnvelope("sigma_bounds: quadratic functional has no positive lower "
                                 "conditional-variance bound");
    }
    if (!(b.sigma_min_sq > 0.0))
        throw DegenerateEnvelope("sigma_bounds: sigma_min^2 <= 0, envelopes disabled");
    return b;
}

} // namespace gdens
