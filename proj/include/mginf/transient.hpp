#pragma once

#include <span>
#include <vector>

#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"

namespace mginf {

// Which transient statistic a curve or report refers to.
enum class StatKind { mean, variance };

// State distribution of the infinite-server queue at one instant.
struct TransientPmf {
    enum class Origin { empty, busy_period_start };
    double t = 0.0;
    Origin origin = Origin::empty;
    std::vector<double> probs;     // P[N(t) = n] for n = 0..n_max
    double truncation_mass = 0.0;  // 1 - sum(probs), clamped at 0
};

// A statistic evaluated along a time grid.
struct MomentCurve {
    StatKind kind = StatKind::mean;
    std::vector<double> grid;
    std::vector<double> values;
};

// Default pmf truncation level: generously past the Poisson bulk.
int default_n_max(double rho);

// State law at time t when the system starts empty: Poisson with parameter
// lambda * integral_0^t (1 - G). Throws truncation_error when the mass beyond
// n_max exceeds trunc_tol (pass n_max = -1 for the automatic level).
TransientPmf empty_origin_pmf(const ServiceModel& model, double lambda, double t,
                              int n_max = -1, double trunc_tol = 1e-9,
                              const QuadratureSpec& spec = {});

// State law at time t when time starts at the beginning of a busy period
// (one customer arrives at t = 0 to an empty system):
//   p[0] = p0[0] G(t),  p[n] = p0[n] G(t) + p0[n-1] (1 - G(t)).
TransientPmf busy_origin_pmf(const ServiceModel& model, double lambda, double t,
                             int n_max = -1, double trunc_tol = 1e-9,
                             const QuadratureSpec& spec = {});

// busy_origin_pmf along a whole grid, sharing one cumulative integral of the
// survival function across the points.
std::vector<TransientPmf> busy_origin_pmf_curve(const ServiceModel& model,
                                                double lambda,
                                                std::span<const double> grid,
                                                int n_max = -1,
                                                double trunc_tol = 1e-9,
                                                const QuadratureSpec& spec = {},
                                                Exec exec = Exec::parallel);

// Mean number in system with the busy-period origin:
//   mu(t) = 1 - G(t) + lambda * integral_0^t (1 - G).
MomentCurve mean_busy_origin(const ServiceModel& model, double lambda,
                             std::span<const double> grid,
                             const QuadratureSpec& spec = {},
                             Exec exec = Exec::parallel);

// Variance with the busy-period origin:
//   V(t) = lambda * integral_0^t (1 - G) + G(t)(1 - G(t)).
MomentCurve variance_busy_origin(const ServiceModel& model, double lambda,
                                 std::span<const double> grid,
                                 const QuadratureSpec& spec = {},
                                 Exec exec = Exec::parallel);

// Limiting state law: Poisson(rho), reported with its truncation mass (never
// an error; the tail is part of the answer).
TransientPmf limit_pmf(double rho, int n_max = -1);

}  // namespace mginf
