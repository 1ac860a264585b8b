#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mginf/numerics.hpp"

namespace mginf {

// A service-time law on [0, inf): CDF G (right-continuous), optional density g
// on (0, inf), the probability mass sitting at t = 0, the mean, an optional
// closed-form quantile, and the interior discontinuity points of G. Instances
// are immutable after construction and safe to share across threads.
struct ServiceModel {
    std::string label;
    std::function<double(double)> cdf;       // required
    std::function<double(double)> density;   // null when the law has no density
    std::function<double(double)> quantile;  // null when no closed form exists
    double atom_at_zero = 0.0;
    double mean = 0.0;
    std::vector<double> jumps;  // interior jump points of G (excludes the origin atom)

    bool has_density() const { return static_cast<bool>(density); }
    bool has_quantile() const { return static_cast<bool>(quantile); }
};

// Service dies exactly at t = alpha.
ServiceModel make_deterministic(double alpha);

// Exponential law with mean alpha.
ServiceModel make_exponential(double alpha);

// Family whose excess-hazard parameter is a constant beta when serving a
// Poisson(lambda) stream at offered load rho:
//   G(t) = 1 - (1 - e^-rho) (lambda + beta) / (lambda e^-rho (e^{ct} - 1) + lambda),
// c = lambda + beta. Valid for -lambda <= beta <= lambda / (e^rho - 1); the
// mean is rho / lambda for every beta in the band.
struct BetaConstantFamilyParams {
    double lambda;
    double rho;
    double beta;
};
ServiceModel make_beta_constant_family(const BetaConstantFamilyParams& p);

// Atom g0 at the origin plus an exponential tail, G(t) = 1 - (1-g0) e^{-lambda t}:
// the unique family whose hazard equals lambda exactly, freezing the mean
// number in system at 1 - g0 for all time.
ServiceModel make_zero_beta_model(double lambda, double g0);

// Law defined implicitly by (1-G) e^{2(G-g0)} = (1-g0) e^{-lambda t} for
// 1/2 < g0 < 1: the time-dependent variance of the queue state is frozen at
// g0 (1-g0).
ServiceModel make_implicit_constant_variance(double lambda, double g0);

// Explicit law G(t) = (1 + sqrt(1 - e^{-2 lambda t})) / 2 with atom 1/2 and
// mean (1 - ln 2) / (2 lambda); its variance curve decreases from 1/4.
ServiceModel make_beta_lambda_variance_model(double lambda);

// Two-parameter implicit family
//   ((1-G)/(1-g0))^{1/(beta+lambda)} ((2 beta G - beta + lambda) /
//     (2 beta g0 - beta + lambda))^{lambda/(beta (beta+lambda))} = e^{-t},
// for beta > -lambda, beta != 0, 1/2 <= g0 < 1. Its queue-state variance is
// monotone with sign opposite to beta.
struct ImplicitVarianceParams {
    double lambda;
    double g0;
    double beta;
};
ServiceModel make_implicit_variance_family(const ImplicitVarianceParams& p);

// g(t) / (1 - G(t)). Requires a density; G(t) = 1 makes the hazard undefined.
double hazard(const ServiceModel& model, double t);

// n-th raw moment, integral of n t^{n-1} (1 - G(t)) dt with an automatically
// grown tail cutoff.
double moment(const ServiceModel& model, int n, const QuadratureSpec& spec = {});

// {lower, upper} closed-form bounds on the n-th moment of the
// constant-variance implicit law with atom g0 (> 1/2):
//   (1-g0) n! e^{-2(1-g0)} / lambda^n <= E S^n <= (1-g0) n! / ((2 g0 - 1) lambda^n).
std::pair<double, double> moment_bounds(double g0, double lambda, int n);

// Inverse-CDF draw at u in [0, 1): 0 when u falls inside the origin atom, the
// closed-form quantile when the family has one, otherwise a bracketed root of
// G(t) = u.
double sample(const ServiceModel& model, double u);

// Smallest horizon T (grown by doubling) with 1 - G(T) < eps.
double tail_cutoff(const ServiceModel& model, double eps);

}  // namespace mginf
