#include "mginf/busy_period.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mginf {

namespace {

void validate_band(double lambda, double rho, double beta, const char* where) {
    if (!(lambda > 0.0)) {
        throw domain_error(std::string(where) + ": lambda must be positive");
    }
    if (!(rho > 0.0)) {
        throw domain_error(std::string(where) + ": rho must be positive");
    }
    const double hi = lambda / std::expm1(rho);
    if (!(beta >= -lambda && beta <= hi)) {
        throw domain_error(std::string(where) +
                           ": beta must lie in [-lambda, lambda/(e^rho - 1)] = [" +
                           std::to_string(-lambda) + ", " + std::to_string(hi) +
                           "]; got " + std::to_string(beta));
    }
}

}  // namespace

double BusyPeriodLaw::cdf(double t) const {
    if (source == Source::closed_form) {
        return busy_cdf_constant_beta(lambda, rho, beta, t);
    }
    if (t >= grid_cdf.back_time()) {
        return grid_cdf.values.back();
    }
    return grid_cdf(t);
}

double busy_cdf_constant_beta(double lambda, double rho, double beta, double t) {
    validate_band(lambda, rho, beta, "busy_cdf_constant_beta");
    if (!(t >= 0.0)) {
        throw domain_error("busy_cdf_constant_beta: t must be non-negative");
    }
    const double c = lambda + beta;
    const double mass = -std::expm1(-rho) * c / lambda;  // (1-e^-rho)(lambda+beta)/lambda
    return 1.0 - mass * std::exp(-std::exp(-rho) * c * t);
}

BusyPeriodLaw make_busy_closed_form(double lambda, double rho, double beta) {
    validate_band(lambda, rho, beta, "make_busy_closed_form");
    BusyPeriodLaw law;
    law.source = BusyPeriodLaw::Source::closed_form;
    law.lambda = lambda;
    law.rho = rho;
    law.beta = beta;
    law.atom_at_zero = busy_cdf_constant_beta(lambda, rho, beta, 0.0);
    return law;
}

BusyPeriodLaw busy_cdf_series(const ServiceModel& model, double lambda,
                              const std::function<double(double)>& beta,
                              std::span<const double> grid, int n_terms,
                              double stop_tol, double trunc_tol, Exec exec) {
    if (!(lambda > 0.0)) {
        throw domain_error("busy_cdf_series: lambda must be positive");
    }
    if (n_terms < 1) {
        throw domain_error("busy_cdf_series: need at least one series term");
    }
    GridFunction base = make_grid_function(grid, std::vector<double>(grid.size(), 0.0));
    const double h = base.step;
    const std::size_t n = grid.size();

    // Cumulative integral of beta by per-cell Simpson (beta is callable
    // anywhere), then the series kernel k and its running integral K.
    std::vector<double> beta_int(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = grid[i - 1];
        const double b = grid[i];
        const double mid = 0.5 * (a + b);
        beta_int[i] = beta_int[i - 1] +
                      (b - a) / 6.0 * (beta(a) + 4.0 * beta(mid) + beta(b));
    }

    // The series only represents a busy-period law when the running average
    // of beta stays inside the admissible band.
    const double rho = lambda * model.mean;
    const double band_hi = lambda / std::expm1(rho);
    for (std::size_t i = 1; i < n; ++i) {
        const double avg = beta_int[i] / grid[i];
        if (avg < -lambda - 1e-9 || avg > band_hi + 1e-9) {
            throw domain_error(
                "busy_cdf_series: running average of beta leaves the band "
                "[-lambda, lambda/(e^rho - 1)] at t=" + std::to_string(grid[i]));
        }
    }

    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        k[i] = std::exp(-lambda * grid[i] - beta_int[i]);
    }
    std::vector<double> K(n, 0.0);  // trapezoid cumulative of k
    for (std::size_t i = 1; i < n; ++i) {
        K[i] = K[i - 1] + 0.5 * h * (k[i - 1] + k[i]);
    }

    const double g0 = model.cdf(0.0);
    const double s0 = 1.0 - g0;
    std::vector<double> P(n);
    for (std::size_t i = 0; i < n; ++i) {
        P[i] = 1.0 - s0 * (k[i] + lambda * K[i]);
    }

    // D = sum_{m>=1} a^m k^{*m}; the identity (m = 0) term is applied as
    // B = P + P * D below.
    const double a_coef = lambda * s0;
    const GridFunction k_gf(h, k);
    GridFunction power = k_gf;  // k^{*m}
    std::vector<double> D(n, 0.0);
    double coef = a_coef;
    double sup = 0.0;
    int terms = 0;
    for (int m = 1; m <= n_terms; ++m) {
        if (m > 1) {
            power = convolve(power, k_gf, exec);
            coef *= a_coef;
        }
        sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double contrib = coef * power.values[i];
            D[i] += contrib;
            sup = std::max(sup, std::abs(contrib));
        }
        terms = m;
        if (sup < stop_tol) {
            break;
        }
    }
    if (sup >= trunc_tol) {
        throw truncation_error(
            "busy_cdf_series: last series term still has sup-norm " +
            std::to_string(sup) + " after " + std::to_string(terms) +
            " terms; raise n_terms or shorten the horizon");
    }

    const GridFunction PD = convolve(GridFunction(h, P), GridFunction(h, D), exec);
    std::vector<double> B(n);
    for (std::size_t i = 0; i < n; ++i) {
        B[i] = P[i] + PD.values[i];
    }

    BusyPeriodLaw law;
    law.source = BusyPeriodLaw::Source::convolution_series;
    law.lambda = lambda;
    law.atom_at_zero = B[0];
    law.grid_cdf = GridFunction(h, std::move(B));
    law.series_terms = terms;
    law.last_term_sup = sup;
    return law;
}

double busy_mean(const BusyPeriodLaw& law, const QuadratureSpec& spec) {
    if (law.source == BusyPeriodLaw::Source::closed_form) {
        const double c = law.lambda + law.beta;
        if (c == 0.0) {
            return 0.0;  // all mass at length zero
        }
        const double mass = -std::expm1(-law.rho) * c / law.lambda;
        const double rate = std::exp(-law.rho) * c;
        // 1 - B = mass * e^{-rate t}; cut where the remaining tail is dust.
        const double T = std::log(std::max(mass / (1e-15 * rate), 2.0)) / rate;
        const auto survival = [&law](double t) { return 1.0 - law.cdf(t); };
        return integrate(survival, 0.0, T, spec);
    }

    const GridFunction& B = law.grid_cdf;
    const double tail = 1.0 - B.values.back();
    if (tail >= 1e-4) {
        throw numeric_error(
            "busy_mean: series horizon too short, 1 - B(end) = " +
            std::to_string(tail) + "; extend the grid");
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < B.size(); ++i) {
        acc += 0.5 * B.step * ((1.0 - B.values[i - 1]) + (1.0 - B.values[i]));
    }
    return acc;
}

}  // namespace mginf
