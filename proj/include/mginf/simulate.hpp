#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mginf/busy_period.hpp"
#include "mginf/service_model.hpp"
#include "mginf/transient.hpp"

namespace mginf {

// Discrete-event study plan shared by the simulation entry points. A seed is
// always explicit: there is no wall-clock default, so identical configs give
// identical output.
struct SimConfig {
    double lambda = 1.0;
    std::int64_t replications = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;          // arrivals are generated on [0, horizon]
    std::vector<double> t_grid;    // observation instants (state simulation)
};

struct SimEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t replications = 0;
};

struct StateSimResult {
    std::vector<double> t_grid;
    int n_max = 0;
    std::vector<SimEstimate> mean;                // per grid instant
    std::vector<SimEstimate> variance;            // across-replication variance of N(t)
    std::vector<std::vector<SimEstimate>> pmf;    // [instant][n], n = 0..n_max
};

// Simulates the queue with one customer arriving to an empty system at t = 0
// (the busy-period origin) plus a Poisson(lambda) stream, and tallies N(t) at
// every grid instant. Replications use independent RNG substreams and integer
// tallies, so results are bit-identical for any worker count.
StateSimResult simulate_state(const SimConfig& config, const ServiceModel& model,
                              int n_max = -1, Exec exec = Exec::parallel);

// Busy-period lengths started by the customer arriving at t = 0: the busy
// period ends at the first instant the system empties. One draw per
// replication, in replication order.
std::vector<double> simulate_busy_period(const SimConfig& config,
                                         const ServiceModel& model,
                                         Exec exec = Exec::parallel);

// One analytic-vs-simulated quantity.
struct ComparisonRow {
    double t = 0.0;
    std::string stat;  // "mean", "variance" or "p"
    int n = -1;        // state index for pmf rows, -1 otherwise
    double analytic = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

struct StateComparison {
    std::vector<ComparisonRow> rows;
    double max_abs_z = 0.0;
    double z_threshold = 0.0;
    double min_expected_count = 0.0;  // pmf rows below this analytic count are skipped
    bool pass = false;
};

// Lines up analytic curves and pmfs with a simulation on the same grid
// (shape_error otherwise) and scores each quantity as z = (analytic -
// estimate) / std_error, with 0/0 scored as 0.
StateComparison compare_state(const MomentCurve& mean_curve,
                              const MomentCurve& variance_curve,
                              const std::vector<TransientPmf>& pmfs,
                              const StateSimResult& sim, double z_threshold = 4.0,
                              double min_expected_count = 25.0);

struct BusyComparison {
    double mean_analytic = 0.0;
    double mean_estimate = 0.0;
    double mean_std_error = 0.0;
    double mean_z = 0.0;
    double atom_analytic = 0.0;
    double atom_estimate = 0.0;
    double atom_std_error = 0.0;
    double atom_z = 0.0;
    double ks_stat = 0.0;
    double ks_threshold = 0.0;
    double ks_level = 0.0;
    std::int64_t continuous_count = 0;
    double z_threshold = 0.0;
    bool pass = false;
};

// Mean/atom z-scores plus a Kolmogorov-Smirnov test of the continuous part
// (lengths above 1e-9) against the law's conditional CDF.
BusyComparison compare_busy(const BusyPeriodLaw& law, std::span<const double> lengths,
                            double ks_level = 0.01, double z_threshold = 4.0,
                            const QuadratureSpec& spec = {});

// One-sample KS acceptance threshold c(level) / sqrt(m).
double ks_critical(double level, std::int64_t m);

}  // namespace mginf
