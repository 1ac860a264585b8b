#include "mginf/transient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mginf {

namespace {

// Poisson(Lambda) probabilities for n = 0..n_max by the stable upward
// recurrence p_{n+1} = p_n Lambda / (n+1).
std::vector<double> poisson_probs(double Lambda, int n_max) {
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
    p[0] = std::exp(-Lambda);
    for (int n = 0; n < n_max; ++n) {
        p[static_cast<std::size_t>(n) + 1] =
            p[static_cast<std::size_t>(n)] * Lambda / static_cast<double>(n + 1);
    }
    return p;
}

double residual_mass(const std::vector<double>& probs) {
    double sum = 0.0;
    for (double v : probs) {
        sum += v;
    }
    return std::max(0.0, 1.0 - sum);
}

void require_within(double truncation, double tol, const char* where) {
    if (truncation > tol) {
        throw truncation_error(std::string(where) + ": truncated mass " +
                               std::to_string(truncation) + " exceeds tolerance " +
                               std::to_string(tol) + "; increase n_max");
    }
}

TransientPmf busy_pmf_from(double t, double Lambda, double G, int n_max,
                           double trunc_tol) {
    const std::vector<double> p0 = poisson_probs(Lambda, n_max);
    TransientPmf out;
    out.t = t;
    out.origin = TransientPmf::Origin::busy_period_start;
    out.probs.resize(p0.size());
    const double survival = 1.0 - G;
    out.probs[0] = p0[0] * G;
    for (std::size_t n = 1; n < p0.size(); ++n) {
        out.probs[n] = p0[n] * G + p0[n - 1] * survival;
    }
    out.truncation_mass = residual_mass(out.probs);
    require_within(out.truncation_mass, trunc_tol, "busy_origin_pmf");
    return out;
}

int resolve_n_max(int n_max, double rho) {
    if (n_max >= 0) {
        return n_max;
    }
    return default_n_max(rho);
}

void validate_inputs(double lambda, double t, const char* where) {
    if (!(lambda > 0.0)) {
        throw domain_error(std::string(where) + ": lambda must be positive");
    }
    if (!(t >= 0.0)) {
        throw domain_error(std::string(where) + ": t must be non-negative");
    }
}

}  // namespace

int default_n_max(double rho) {
    if (!(rho >= 0.0)) {
        throw domain_error("default_n_max: rho must be non-negative");
    }
    return static_cast<int>(std::ceil(rho + 12.0 * std::sqrt(rho))) + 20;
}

TransientPmf empty_origin_pmf(const ServiceModel& model, double lambda, double t,
                              int n_max, double trunc_tol, const QuadratureSpec& spec) {
    validate_inputs(lambda, t, "empty_origin_pmf");
    const int nm = resolve_n_max(n_max, lambda * model.mean);
    const auto survival = [&model](double u) { return 1.0 - model.cdf(u); };
    const double Lambda = lambda * integrate(survival, 0.0, t, spec, model.jumps);
    TransientPmf out;
    out.t = t;
    out.origin = TransientPmf::Origin::empty;
    out.probs = poisson_probs(Lambda, nm);
    out.truncation_mass = residual_mass(out.probs);
    require_within(out.truncation_mass, trunc_tol, "empty_origin_pmf");
    return out;
}

TransientPmf busy_origin_pmf(const ServiceModel& model, double lambda, double t,
                             int n_max, double trunc_tol, const QuadratureSpec& spec) {
    validate_inputs(lambda, t, "busy_origin_pmf");
    const int nm = resolve_n_max(n_max, lambda * model.mean);
    const auto survival = [&model](double u) { return 1.0 - model.cdf(u); };
    const double Lambda = lambda * integrate(survival, 0.0, t, spec, model.jumps);
    return busy_pmf_from(t, Lambda, model.cdf(t), nm, trunc_tol);
}

std::vector<TransientPmf> busy_origin_pmf_curve(const ServiceModel& model,
                                                double lambda,
                                                std::span<const double> grid,
                                                int n_max, double trunc_tol,
                                                const QuadratureSpec& spec, Exec exec) {
    if (!(lambda > 0.0)) {
        throw domain_error("busy_origin_pmf_curve: lambda must be positive");
    }
    const int nm = resolve_n_max(n_max, lambda * model.mean);
    const std::vector<double> tail = cumulative_tail_integral(model, grid, spec, exec);
    std::vector<TransientPmf> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.push_back(busy_pmf_from(grid[i], lambda * tail[i], model.cdf(grid[i]), nm,
                                    trunc_tol));
    }
    return out;
}

MomentCurve mean_busy_origin(const ServiceModel& model, double lambda,
                             std::span<const double> grid, const QuadratureSpec& spec,
                             Exec exec) {
    if (!(lambda > 0.0)) {
        throw domain_error("mean_busy_origin: lambda must be positive");
    }
    const std::vector<double> tail = cumulative_tail_integral(model, grid, spec, exec);
    MomentCurve out;
    out.kind = StatKind::mean;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.values[i] = 1.0 - model.cdf(grid[i]) + lambda * tail[i];
    }
    return out;
}

MomentCurve variance_busy_origin(const ServiceModel& model, double lambda,
                                 std::span<const double> grid,
                                 const QuadratureSpec& spec, Exec exec) {
    if (!(lambda > 0.0)) {
        throw domain_error("variance_busy_origin: lambda must be positive");
    }
    const std::vector<double> tail = cumulative_tail_integral(model, grid, spec, exec);
    MomentCurve out;
    out.kind = StatKind::variance;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double G = model.cdf(grid[i]);
        out.values[i] = lambda * tail[i] + G * (1.0 - G);
    }
    return out;
}

TransientPmf limit_pmf(double rho, int n_max) {
    if (!(rho >= 0.0)) {
        throw domain_error("limit_pmf: rho must be non-negative");
    }
    const int nm = resolve_n_max(n_max, rho);
    TransientPmf out;
    out.t = std::numeric_limits<double>::infinity();
    out.origin = TransientPmf::Origin::empty;
    out.probs = poisson_probs(rho, nm);
    out.truncation_mass = residual_mass(out.probs);
    return out;
}

}  // namespace mginf
