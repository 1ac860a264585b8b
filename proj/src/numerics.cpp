#include "mginf/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>

#include "mginf/service_model.hpp"

namespace mginf {

namespace {

struct SimpsonFrame {
    double a, fa, b, fb, m, fm, whole, tol;
    int depth;
};

// Recursive adaptive Simpson with Richardson correction. tol is halved per
// split; the standard 15x factor makes the accepted error track tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double fa,
                        double b, double fb, double m, double fm, double whole,
                        double tol, int depth, int max_depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || (b - a) <= std::abs(m) * 1e-15) {
        return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
        throw numeric_error("integrate: adaptive refinement exceeded max depth " +
                            std::to_string(max_depth) + " on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "], local error estimate " +
                            std::to_string(std::abs(delta) / 15.0));
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1,
                            max_depth) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1,
                            max_depth);
}

// One smooth piece [a, b]; when b is a jump point of the integrand, evaluate
// the right endpoint just inside the piece so only the left limit is seen.
double integrate_piece(const std::function<double(double)>& f, double a, double b,
                       bool nudge_right, const QuadratureSpec& spec, double tol_abs) {
    if (b <= a) {
        return 0.0;
    }
    const double width = b - a;
    const double b_eval = nudge_right ? b - width * 1e-12 : b;
    const double fa = f(a);
    const double fb = f(b_eval);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = width / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(tol_abs, spec.rel_tol * std::abs(whole));
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 0, spec.max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, std::span<const double> jumps) {
    if (std::isnan(a) || std::isnan(b)) {
        throw domain_error("integrate: NaN limit");
    }
    const double b_eff = std::isinf(b) ? spec.tail_cutoff : b;
    if (b_eff < a) {
        throw domain_error("integrate: upper limit below lower limit");
    }
    if (b_eff == a) {
        return 0.0;
    }

    // Piece boundaries: the limits plus every jump strictly inside.  A jump
    // sitting exactly on the upper limit still needs the one-sided endpoint
    // treatment, otherwise the discontinuity at b defeats the refinement.
    std::vector<double> cuts;
    cuts.push_back(a);
    bool b_is_jump = false;
    for (double j : jumps) {
        if (j > a && j < b_eff) {
            cuts.push_back(j);
        }
        if (j == b_eff) {
            b_is_jump = true;
        }
    }
    cuts.push_back(b_eff);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double tol_abs = spec.abs_tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Every interior cut is a jump point; the final cut is the plain
        // integration limit unless a jump lands exactly on it.
        const bool right_is_jump = (i + 2 < cuts.size()) || b_is_jump;
        total += integrate_piece(f, cuts[i], cuts[i + 1], right_is_jump, spec, tol_abs);
    }
    return total;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
    if (!(lo <= hi)) {
        throw domain_error("find_root: empty interval");
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw bracket_error("find_root: no sign change over [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
    }

    // Secant steps while they make two-sided progress, with a bisection after
    // any step that replaced the same endpoint as the one before it (the
    // one-sided stall of regula falsi).  Near a simple root the secant
    // alternates sides and converges superlinearly; the stall rule bounds the
    // worst case at two evaluations per bracket halving.
    bool force_bisect = false;
    int last_side = 0;
    for (int it = 0; it < 200; ++it) {
        const double width = hi - lo;
        if (width <= tol) {
            break;
        }
        double x;
        if (force_bisect) {
            x = 0.5 * (lo + hi);
        } else {
            x = lo - flo * (hi - lo) / (fhi - flo);
            if (!std::isfinite(x) || x <= lo || x >= hi) {
                x = 0.5 * (lo + hi);
            }
        }
        if (x <= lo || x >= hi) {
            // The bracket cannot be split at double resolution; lo and hi are
            // adjacent (or equal), so either endpoint is as good as it gets.
            return 0.5 * (lo + hi);
        }
        const double fx = f(x);
        if (fx == 0.0 || std::abs(fx) <= tol) {
            // |f| <= tol satisfies the contract even if the bracket is wide.
            return x;
        }
        int side;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            side = +1;
        }
        force_bisect = !force_bisect && side == last_side;
        last_side = side;
    }
    return 0.5 * (lo + hi);
}

double finite_difference(const std::function<double(double)>& f, double t, double h) {
    if (!(h > 0.0)) {
        throw domain_error("finite_difference: step must be positive");
    }
    if (t - h < 0.0) {
        return (f(t + h) - f(t)) / h;
    }
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

GridFunction::GridFunction(double step_, std::vector<double> values_)
    : step(step_), values(std::move(values_)) {
    if (!(step > 0.0)) {
        throw shape_error("GridFunction: step must be positive");
    }
    if (values.empty()) {
        throw shape_error("GridFunction: empty value array");
    }
}

double GridFunction::operator()(double t) const {
    if (t <= 0.0) {
        return values.front();
    }
    const double pos = t / step;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) {
        return values.back();
    }
    const double w = pos - static_cast<double>(i);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

GridFunction make_grid_function(std::span<const double> grid, std::vector<double> values) {
    if (grid.size() != values.size()) {
        throw shape_error("make_grid_function: grid/value length mismatch");
    }
    if (grid.size() < 2) {
        throw shape_error("make_grid_function: need at least two grid points");
    }
    if (std::abs(grid[0]) > 1e-15) {
        throw shape_error("make_grid_function: grid must start at 0");
    }
    const double h = grid[1] - grid[0];
    if (!(h > 0.0)) {
        throw shape_error("make_grid_function: grid must be increasing");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double expected = h * static_cast<double>(i);
        if (std::abs(grid[i] - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
            throw shape_error("make_grid_function: grid spacing is not uniform");
        }
    }
    return GridFunction(h, std::move(values));
}

double integrate_doubling(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec, std::span<const double> jumps) {
    if (std::isnan(a) || std::isnan(b)) {
        throw domain_error("integrate: NaN limit");
    }
    const double b_eff = std::isinf(b) ? spec.tail_cutoff : b;
    if (!(b_eff - a > 1.0)) {
        return integrate(f, a, b_eff, spec, jumps);
    }
    double w = 1e-3;
    double lo = a;
    double total = 0.0;
    while (lo < b_eff) {
        const double hi = std::min(lo + w, b_eff);
        total += integrate(f, lo, hi, spec, jumps);
        lo = hi;
        w *= 2.0;
    }
    return total;
}

GridFunction convolve(const GridFunction& a, const GridFunction& b, Exec exec) {
    if (std::abs(a.step - b.step) > 1e-12 * std::max(a.step, b.step)) {
        throw shape_error("convolve: grid steps differ");
    }
    if (a.size() != b.size()) {
        throw shape_error("convolve: grid lengths differ");
    }
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    const double h = a.step;
    std::vector<double> out(a.size(), 0.0);
    const double* pa = a.values.data();
    const double* pb = b.values.data();

    // Each output index owns an independent inner sum, evaluated in a fixed
    // serial order, so the parallel and serial paths agree bitwise.
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 1; i < n; ++i) {
            double s = 0.5 * (pa[0] * pb[i] + pa[i] * pb[0]);
            for (std::ptrdiff_t j = 1; j < i; ++j) {
                s += pa[j] * pb[i - j];
            }
            out[static_cast<std::size_t>(i)] = h * s;
        }
    } else {
        for (std::ptrdiff_t i = 1; i < n; ++i) {
            double s = 0.5 * (pa[0] * pb[i] + pa[i] * pb[0]);
            for (std::ptrdiff_t j = 1; j < i; ++j) {
                s += pa[j] * pb[i - j];
            }
            out[static_cast<std::size_t>(i)] = h * s;
        }
    }
    return GridFunction(h, std::move(out));
}

std::vector<double> cumulative_tail_integral(const ServiceModel& model,
                                             std::span<const double> grid,
                                             const QuadratureSpec& spec, Exec exec) {
    if (grid.empty()) {
        return {};
    }
    if (grid[0] < 0.0) {
        throw domain_error("cumulative_tail_integral: grid must start at or after 0");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] < grid[i - 1]) {
            throw domain_error("cumulative_tail_integral: grid must be non-decreasing");
        }
    }

    const auto survival = [&model](double t) { return 1.0 - model.cdf(t); };
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    std::vector<double> cell(grid.size(), 0.0);
    const std::span<const double> jumps(model.jumps);

    if (exec == Exec::parallel) {
        // An exception escaping an OpenMP loop aborts the process, so capture
        // the first one and rethrow it after the region.
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed)) {
                continue;
            }
            try {
                const double a = i == 0 ? 0.0 : grid[i - 1];
                cell[static_cast<std::size_t>(i)] =
                    integrate_doubling(survival, a, grid[i], spec, jumps);
            } catch (...) {
#pragma omp critical
                {
                    if (!failed.exchange(true)) {
                        first_error = std::current_exception();
                    }
                }
            }
        }
        if (first_error) {
            std::rethrow_exception(first_error);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double a = i == 0 ? 0.0 : grid[i - 1];
            cell[static_cast<std::size_t>(i)] =
                integrate_doubling(survival, a, grid[i], spec, jumps);
        }
    }

    std::vector<double> out(grid.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += cell[i];
        out[i] = acc;
    }
    return out;
}

std::vector<double> linspace(double start, double stop, int points) {
    if (points < 1) {
        throw domain_error("linspace: need at least one point");
    }
    if (stop < start) {
        throw domain_error("linspace: stop below start");
    }
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = start;
        return out;
    }
    const double h = (stop - start) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        out[static_cast<std::size_t>(i)] = start + h * static_cast<double>(i);
    }
    out.back() = stop;
    return out;
}

}  // namespace mginf
