#include "mginf/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mginf {

namespace {

// Treat G(t) at or above this as G = 1.  The cut sits at survival 1e-6, not
// closer to 1, because the hazard g/(1-G) inherits a relative error of about
// eps/(1-G) from forming 1-G in doubles; past this point that noise would
// exceed the violation slack and fabricate verdicts.  The derivatives of both
// statistics carry a (1-G) factor, so everything here is below 1e-6 anyway.
constexpr double kSaturated = 1.0 - 1e-6;

// Relative slack on h <= threshold so that families satisfying the condition
// with exact equality (last-ulp rounding aside) report no violations.
bool condition_violated(double h, double threshold) {
    return h > threshold * (1.0 + 1e-9) + 1e-12;
}

void validate_grid(std::span<const double> grid, const char* where) {
    for (double t : grid) {
        if (!(t > 0.0)) {
            throw domain_error(std::string(where) + ": grid times must be positive");
        }
    }
}

MonotonicityReport sweep(const ServiceModel& model, double lambda,
                         std::span<const double> grid, StatKind kind) {
    MonotonicityReport rep;
    rep.kind = kind;
    rep.derivative_min = std::numeric_limits<double>::infinity();
    bool any_derivative = false;

    for (double t : grid) {
        ++rep.points_checked;
        const double G = model.cdf(t);

        if (G >= kSaturated) {
            // Saturated law: derivative 0, nothing to check.
            ++rep.points_auto_satisfied;
            rep.derivative_min = std::min(rep.derivative_min, 0.0);
            any_derivative = true;
            continue;
        }

        const bool variance_trivial =
            kind == StatKind::variance && G <= 0.5 + 1e-12;
        if (variance_trivial && !model.has_density()) {
            // Condition holds with no hazard needed; the derivative magnitude
            // is simply unavailable for this point.
            ++rep.points_auto_satisfied;
            continue;
        }
        if (!model.has_density()) {
            rep.applicable = false;
            rep.inapplicable_reason = model.label +
                                      " has no density where the hazard condition "
                                      "must be evaluated";
            rep.violations.clear();
            rep.condition_holds_everywhere = false;
            rep.derivative_min = 0.0;
            return rep;
        }

        const double h = hazard(model, t);
        const double derivative =
            kind == StatKind::mean
                ? (1.0 - G) * (lambda - h)
                : (1.0 - G) * (h * (1.0 - 2.0 * G) + lambda);
        rep.derivative_min = std::min(rep.derivative_min, derivative);
        any_derivative = true;

        if (variance_trivial) {
            ++rep.points_auto_satisfied;
            continue;
        }
        const double threshold =
            kind == StatKind::mean ? lambda : lambda / (2.0 * G - 1.0);
        if (condition_violated(h, threshold)) {
            rep.violations.push_back({t, h, threshold});
        }
    }

    if (!any_derivative) {
        rep.derivative_min = 0.0;
    }
    rep.condition_holds_everywhere = rep.violations.empty();
    return rep;
}

}  // namespace

double beta_of(const ServiceModel& model, double lambda, double t) {
    if (!(lambda > 0.0)) {
        throw domain_error("beta_of: lambda must be positive");
    }
    return hazard(model, t) - lambda;
}

double mean_derivative(const ServiceModel& model, double lambda, double t) {
    if (!(lambda > 0.0)) {
        throw domain_error("mean_derivative: lambda must be positive");
    }
    const double G = model.cdf(t);
    if (G >= kSaturated) {
        return 0.0;
    }
    return (1.0 - G) * (lambda - hazard(model, t));
}

double variance_derivative(const ServiceModel& model, double lambda, double t) {
    if (!(lambda > 0.0)) {
        throw domain_error("variance_derivative: lambda must be positive");
    }
    const double G = model.cdf(t);
    if (G >= kSaturated) {
        return 0.0;
    }
    return (1.0 - G) * (hazard(model, t) * (1.0 - 2.0 * G) + lambda);
}

MonotonicityReport check_mean_monotone(const ServiceModel& model, double lambda,
                                       std::span<const double> grid) {
    if (!(lambda > 0.0)) {
        throw domain_error("check_mean_monotone: lambda must be positive");
    }
    validate_grid(grid, "check_mean_monotone");
    return sweep(model, lambda, grid, StatKind::mean);
}

MonotonicityReport check_variance_monotone(const ServiceModel& model, double lambda,
                                           std::span<const double> grid) {
    if (!(lambda > 0.0)) {
        throw domain_error("check_variance_monotone: lambda must be positive");
    }
    validate_grid(grid, "check_variance_monotone");
    return sweep(model, lambda, grid, StatKind::variance);
}

double riccati_residual(const ServiceModel& model, double lambda,
                        const std::function<double(double)>& beta, double t,
                        double h_step) {
    if (!(lambda > 0.0)) {
        throw domain_error("riccati_residual: lambda must be positive");
    }
    if (!(t > 0.0)) {
        throw domain_error("riccati_residual: t must be positive");
    }
    const double fd = finite_difference(model.cdf, t, h_step);
    const double G = model.cdf(t);
    const double b = beta(t);
    const double rhs = -lambda * G * G - (b - lambda) * G + b;
    return fd - rhs;
}

}  // namespace mginf
