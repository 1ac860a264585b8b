#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mginf/service_model.hpp"
#include "mginf/transient.hpp"

namespace mginf {

// One grid point where the hazard condition fails.
struct MonotonicityViolation {
    double t = 0.0;
    double hazard_value = 0.0;
    double threshold = 0.0;
};

// Outcome of a hazard-condition sweep over a time grid.
struct MonotonicityReport {
    StatKind kind = StatKind::mean;
    // False when the model cannot support the check (no density where the
    // condition must be evaluated); the remaining fields are then meaningless.
    bool applicable = true;
    std::string inapplicable_reason;
    bool condition_holds_everywhere = false;
    std::vector<MonotonicityViolation> violations;
    double derivative_min = 0.0;  // smallest derivative seen where computable
    int points_checked = 0;
    int points_auto_satisfied = 0;  // condition trivially true (G = 1, or
                                    // G <= 1/2 for the variance check)
};

// Excess hazard beta(t) = h(t) - lambda.
double beta_of(const ServiceModel& model, double lambda, double t);

// d/dt of the busy-origin mean: (1 - G(t)) (lambda - h(t)); 0 where G(t) = 1.
double mean_derivative(const ServiceModel& model, double lambda, double t);

// d/dt of the busy-origin variance: (1 - G(t)) (h(t)(1 - 2 G(t)) + lambda);
// 0 where G(t) = 1.
double variance_derivative(const ServiceModel& model, double lambda, double t);

// Sweeps h(t) <= lambda over the grid: the mean is non-decreasing iff the
// condition holds everywhere. Grid times must be positive.
MonotonicityReport check_mean_monotone(const ServiceModel& model, double lambda,
                                       std::span<const double> grid);

// Sweeps h(t) <= lambda / (2 G(t) - 1) where G(t) > 1/2 (trivially satisfied
// elsewhere): the variance is non-decreasing iff it holds everywhere.
MonotonicityReport check_variance_monotone(const ServiceModel& model, double lambda,
                                           std::span<const double> grid);

// Residual of the Riccati identity
//   dG/dt = -lambda G^2 - (beta(t) - lambda) G + beta(t)
// with dG/dt taken as a finite difference of step h_step. Near zero when the
// model is the member of the beta-parameterized service family generated by
// the supplied beta (the constant-beta family in particular); generically
// nonzero otherwise.
double riccati_residual(const ServiceModel& model, double lambda,
                        const std::function<double(double)>& beta, double t,
                        double h_step);

}  // namespace mginf
