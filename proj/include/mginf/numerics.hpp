#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mginf/errors.hpp"

namespace mginf {

// Selects between the OpenMP kernel and the serial reference implementation of
// an operation. Both produce bit-identical results; parallel falls back to
// serial when built without OpenMP.
enum class Exec { serial, parallel };

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    // Deep enough for square-root-type edge behaviour: such integrands gain
    // only ~2^(k/2) accuracy per level against a tolerance halving every
    // level, so tight absolute tolerances legitimately need ~55 levels.
    int max_depth = 60;
    // Finite upper limit substituted when an integral is taken to infinity.
    double tail_cutoff = 1e6;
};

// Adaptive Simpson integral of f over [a, b]. The interval is split at every
// interior point of `jumps` and each piece is integrated separately; at a jump
// the integrand is evaluated one-sided (just inside the piece), so integrands
// with step discontinuities (deterministic service CDFs) are handled exactly.
// An infinite b is replaced by spec.tail_cutoff.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {}, std::span<const double> jumps = {});

// As integrate, but splits a span wider than one unit into width-doubling
// pieces anchored at the left edge (first piece 1e-3 wide).  Integrands with
// edge behaviour at a — e.g. a square-root rise, whose refinement cost grows
// with the width of the piece containing the edge — then stay affordable on
// arbitrarily wide ranges.  Spans of one unit or less go through unchanged.
double integrate_doubling(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {},
                          std::span<const double> jumps = {});

// Root of f in [lo, hi] by bracketed bisection polished with secant steps.
// Requires a sign change over the bracket; stops when the bracket width or
// |f| drops below tol. The result always lies inside the initial bracket.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

// Central difference (f(t+h) - f(t-h)) / 2h, falling back to the one-sided
// quotient when t - h would leave the domain (t - h < 0).
double finite_difference(const std::function<double(double)>& f, double t, double h);

// Samples of a function on a uniform grid t_i = i * step, the substrate for
// discrete convolution.
struct GridFunction {
    double step = 0.0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(double step_, std::vector<double> values_);

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return step * static_cast<double>(i); }
    double back_time() const { return time_at(values.empty() ? 0 : values.size() - 1); }

    // Linear interpolation; clamps to the last value beyond the grid.
    double operator()(double t) const;
};

// Builds a GridFunction from explicit times, validating that they start at 0
// and are uniformly spaced (1e-12 relative).
GridFunction make_grid_function(std::span<const double> grid, std::vector<double> values);

// Trapezoid-weighted Cauchy product (a * b)[i] = h * sum_j w_j a[j] b[i-j],
// the discrete counterpart of the convolution of two integrable functions on
// [0, inf). Grids must share step and length.
GridFunction convolve(const GridFunction& a, const GridFunction& b,
                      Exec exec = Exec::parallel);

struct ServiceModel;

// Lambda-tilde curve: values[i] = integral of (1 - G) over [0, grid[i]].
// The grid must be non-decreasing with grid[0] >= 0. Cell integrals run in
// parallel; the prefix sum is serial, so results are independent of the
// worker count.
std::vector<double> cumulative_tail_integral(const ServiceModel& model,
                                             std::span<const double> grid,
                                             const QuadratureSpec& spec = {},
                                             Exec exec = Exec::parallel);

// points >= 2 evenly spaced values from start to stop inclusive (points == 1
// yields {start}).
std::vector<double> linspace(double start, double stop, int points);

}  // namespace mginf
