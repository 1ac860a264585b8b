#pragma once

#include <functional>
#include <span>

#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"

namespace mginf {

// Distribution of the busy-period length, either in the closed form available
// for the constant-beta service family or as a convolution series evaluated
// on a uniform grid.
struct BusyPeriodLaw {
    enum class Source { closed_form, convolution_series };
    Source source = Source::closed_form;
    double atom_at_zero = 0.0;

    // closed_form parameters
    double lambda = 0.0;
    double rho = 0.0;
    double beta = 0.0;

    // convolution_series payload
    GridFunction grid_cdf;
    int series_terms = 0;       // highest convolution power included
    double last_term_sup = 0.0; // sup-norm of the last included term

    // CDF at t: exact for closed_form, linearly interpolated for series.
    double cdf(double t) const;
};

// Closed-form busy-period CDF of the constant-beta family:
//   B(t) = 1 - ((lambda+beta)/lambda) (1 - e^-rho) e^{-e^-rho (lambda+beta) t}.
// Exponential above an atom of mass B(0) at the origin.
double busy_cdf_constant_beta(double lambda, double rho, double beta, double t);

BusyPeriodLaw make_busy_closed_form(double lambda, double rho, double beta);

// General busy-period CDF as the convolution series
//   B = P + P * sum_{n>=1} [lambda (1-G(0))]^n k^{*n},
// with k(t) = exp(-lambda t - int_0^t beta) and
// P(t) = 1 - (1-G(0)) (k(t) + lambda int_0^t k). The n = 0 term of the series
// is the convolution identity and is applied analytically rather than as a
// grid-borne delta. Evaluated on a uniform grid (times from 0, equal steps);
// terms stop once their sup-norm falls below stop_tol, and a truncation_error
// is raised if the cap n_terms still leaves the last term above trunc_tol.
BusyPeriodLaw busy_cdf_series(const ServiceModel& model, double lambda,
                              const std::function<double(double)>& beta,
                              std::span<const double> grid, int n_terms = 64,
                              double stop_tol = 1e-8, double trunc_tol = 1e-6,
                              Exec exec = Exec::parallel);

// Mean busy-period length, integral of 1 - B: by adaptive quadrature for the
// closed form, by grid summation for a series law (whose horizon must hold
// essentially all the mass: 1 - B(end) < 1e-4).
double busy_mean(const BusyPeriodLaw& law, const QuadratureSpec& spec = {});

}  // namespace mginf
