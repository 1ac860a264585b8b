#include "mginf/service_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace mginf {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Root of a strictly decreasing F on [lo_limit, hi_limit] given an analytic
// bracket [x_lo, x_hi] (widened to the limits if rounding spoiled its signs).
double solve_decreasing(const std::function<double(double)>& F, double lo_limit,
                        double hi_limit, double x_lo, double x_hi) {
    x_lo = std::clamp(x_lo, lo_limit, hi_limit);
    x_hi = std::clamp(x_hi, lo_limit, hi_limit);
    if (x_lo > x_hi) {
        std::swap(x_lo, x_hi);
    }
    if (F(x_lo) < 0.0) {
        x_lo = lo_limit;
    }
    if (F(x_hi) > 0.0) {
        x_hi = hi_limit;
    }
    if (F(x_lo) <= 0.0) {
        return x_lo;
    }
    if (F(x_hi) >= 0.0) {
        return x_hi;
    }
    // Polish to double resolution: caller-side quadrature differentiates the
    // solved curve numerically, and any fixed solve tolerance shows up there
    // as a noise floor its error estimate can never settle under.
    return find_root(F, x_lo, x_hi, 0.0);
}

// Mean by quadrature of the survival function up to an analytic exponential
// tail bound: 1 - G(t) <= amp * e^{-rate t} makes the neglected tail below
// amp e^{-rate T} / rate.
double mean_by_quadrature(const std::function<double(double)>& cdf, double amp,
                          double rate) {
    const double eps = 1e-13;
    const double T = std::max(1.0, std::log(std::max(amp / (eps * rate), 2.0)) / rate);
    QuadratureSpec spec;
    const auto survival = [&cdf](double t) { return 1.0 - cdf(t); };
    // Families on the variance boundary rise like sqrt(t) at the origin;
    // keeping the first piece short makes that edge affordable.
    return integrate_doubling(survival, 0.0, T, spec);
}

}  // namespace

ServiceModel make_deterministic(double alpha) {
    if (!(alpha > 0.0)) {
        throw domain_error("make_deterministic: alpha must be positive; got alpha=" +
                           fmt_g(alpha));
    }
    ServiceModel m;
    m.label = "deterministic(alpha=" + fmt_g(alpha) + ")";
    m.cdf = [alpha](double t) { return t < alpha ? 0.0 : 1.0; };
    m.density = nullptr;
    m.quantile = [alpha](double) { return alpha; };
    m.atom_at_zero = 0.0;
    m.mean = alpha;
    m.jumps = {alpha};
    return m;
}

ServiceModel make_exponential(double alpha) {
    if (!(alpha > 0.0)) {
        throw domain_error("make_exponential: alpha must be positive; got alpha=" +
                           fmt_g(alpha));
    }
    ServiceModel m;
    m.label = "exponential(alpha=" + fmt_g(alpha) + ")";
    m.cdf = [alpha](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t / alpha); };
    m.density = [alpha](double t) {
        return t < 0.0 ? 0.0 : std::exp(-t / alpha) / alpha;
    };
    m.quantile = [alpha](double u) { return -alpha * std::log1p(-u); };
    m.atom_at_zero = 0.0;
    m.mean = alpha;
    return m;
}

ServiceModel make_beta_constant_family(const BetaConstantFamilyParams& p) {
    const double lambda = p.lambda;
    const double rho = p.rho;
    const double beta = p.beta;
    if (!(lambda > 0.0)) {
        throw domain_error("make_beta_constant_family: lambda must be positive; got " +
                           fmt_g(lambda));
    }
    if (!(rho > 0.0)) {
        throw domain_error("make_beta_constant_family: rho must be positive; got " +
                           fmt_g(rho));
    }
    const double beta_hi = lambda / std::expm1(rho);
    if (!(beta >= -lambda && beta <= beta_hi)) {
        throw domain_error(
            "make_beta_constant_family: beta must lie in [-lambda, lambda/(e^rho - 1)] "
            "= [" + fmt_g(-lambda) + ", " + fmt_g(beta_hi) + "]; got " + fmt_g(beta));
    }

    ServiceModel m;
    m.label = "beta-constant(lambda=" + fmt_g(lambda) + ",rho=" + fmt_g(rho) +
              ",beta=" + fmt_g(beta) + ")";
    m.mean = rho / lambda;

    const double c = lambda + beta;
    if (c == 0.0) {
        // beta = -lambda collapses the law onto the origin atom.
        m.cdf = [](double) { return 1.0; };
        m.quantile = [](double) { return 0.0; };
        m.atom_at_zero = 1.0;
        m.mean = 0.0;
        return m;
    }

    const double er = std::exp(-rho);         // e^-rho
    const double B = -std::expm1(-rho);       // 1 - e^-rho
    const double A = B * c / lambda;          // survival at 0
    const double atom = std::max(0.0, 1.0 - A);

    // Survival written with decaying exponentials only, so it never overflows:
    // 1 - G(t) = A e^{-ct} / (e^-rho + B e^{-ct}).
    m.cdf = [A, B, er, c, atom](double t) {
        if (t <= 0.0) {
            return atom;
        }
        const double e = std::exp(-c * t);
        return 1.0 - A * e / (er + B * e);
    };
    m.density = [A, B, er, c](double t) {
        if (t < 0.0) {
            return 0.0;
        }
        const double e = std::exp(-c * t);
        const double den = er + B * e;
        return A * c * er * e / (den * den);
    };
    m.quantile = [A, B, er, c, atom](double u) {
        if (u <= atom) {
            return 0.0;
        }
        const double s = 1.0 - u;  // target survival
        const double e = s * er / (A - s * B);
        return -std::log(e) / c;
    };
    m.atom_at_zero = atom;
    return m;
}

ServiceModel make_zero_beta_model(double lambda, double g0) {
    if (!(lambda > 0.0)) {
        throw domain_error("make_zero_beta_model: lambda must be positive; got " +
                           fmt_g(lambda));
    }
    if (!(g0 >= 0.0 && g0 < 1.0)) {
        throw domain_error("make_zero_beta_model: g0 must lie in [0, 1); got " +
                           fmt_g(g0));
    }
    ServiceModel m;
    m.label = "zero-beta(lambda=" + fmt_g(lambda) + ",g0=" + fmt_g(g0) + ")";
    const double s0 = 1.0 - g0;
    m.cdf = [lambda, g0, s0](double t) {
        return t <= 0.0 ? g0 : 1.0 - s0 * std::exp(-lambda * t);
    };
    m.density = [lambda, s0](double t) {
        return t < 0.0 ? 0.0 : lambda * s0 * std::exp(-lambda * t);
    };
    m.quantile = [lambda, g0, s0](double u) {
        if (u <= g0) {
            return 0.0;
        }
        return (std::log(s0) - std::log(1.0 - u)) / lambda;
    };
    m.atom_at_zero = g0;
    m.mean = s0 / lambda;
    return m;
}

ServiceModel make_implicit_constant_variance(double lambda, double g0) {
    if (!(lambda > 0.0)) {
        throw domain_error(
            "make_implicit_constant_variance: lambda must be positive; got " +
            fmt_g(lambda));
    }
    if (!(g0 > 0.5 && g0 < 1.0)) {
        throw domain_error(
            "make_implicit_constant_variance: g0 must lie in (1/2, 1); got " +
            fmt_g(g0));
    }

    const double s0 = 1.0 - g0;
    // phi(x) = ln((1-x)/(1-g0)) + 2(x-g0); the law satisfies phi(G(t)) = -lambda t.
    const auto phi = [g0, s0](double x) {
        return std::log((1.0 - x) / s0) + 2.0 * (x - g0);
    };
    const double hi_limit = 1.0 - 1e-16;

    ServiceModel m;
    m.label = "implicit-constant-variance(lambda=" + fmt_g(lambda) + ",g0=" +
              fmt_g(g0) + ")";
    m.cdf = [lambda, g0, s0, phi, hi_limit](double t) {
        if (t <= 0.0) {
            return g0;
        }
        const double E = std::exp(-lambda * t);
        const double s_hi = s0 * E;  // 1 - G(t) can be no larger
        // below ~1e-14 the bracket [1 - s_hi, 1 - s_lo] collapses in double
        // precision; the law is saturated for every practical purpose
        if (s_hi < 1e-14) {
            return 1.0;
        }
        const double s_lo = s_hi * std::exp(-2.0 * s0);
        const auto F = [&phi, lambda, t](double x) { return phi(x) + lambda * t; };
        return solve_decreasing(F, g0, hi_limit, 1.0 - s_hi, 1.0 - s_lo);
    };
    const auto cdf = m.cdf;
    m.density = [lambda, cdf](double t) {
        if (t < 0.0) {
            return 0.0;
        }
        const double G = cdf(t);
        return lambda * (1.0 - G) / (2.0 * G - 1.0);
    };
    m.quantile = [lambda, g0, phi](double u) {
        if (u <= g0) {
            return 0.0;
        }
        return -phi(u) / lambda;
    };
    m.atom_at_zero = g0;
    m.mean = mean_by_quadrature(m.cdf, s0, lambda);
    return m;
}

ServiceModel make_beta_lambda_variance_model(double lambda) {
    if (!(lambda > 0.0)) {
        throw domain_error(
            "make_beta_lambda_variance_model: lambda must be positive; got " +
            fmt_g(lambda));
    }
    ServiceModel m;
    m.label = "beta-lambda-variance(lambda=" + fmt_g(lambda) + ")";
    m.cdf = [lambda](double t) {
        if (t <= 0.0) {
            return 0.5;
        }
        return 0.5 * (1.0 + std::sqrt(-std::expm1(-2.0 * lambda * t)));
    };
    m.density = [lambda](double t) {
        if (t < 0.0) {
            return 0.0;
        }
        const double E = std::exp(-2.0 * lambda * t);
        return lambda * E / (2.0 * std::sqrt(-std::expm1(-2.0 * lambda * t)));
    };
    m.quantile = [lambda](double u) {
        if (u <= 0.5) {
            return 0.0;
        }
        return -std::log(4.0 * u * (1.0 - u)) / (2.0 * lambda);
    };
    m.atom_at_zero = 0.5;
    m.mean = (1.0 - std::log(2.0)) / (2.0 * lambda);
    return m;
}

ServiceModel make_implicit_variance_family(const ImplicitVarianceParams& p) {
    const double lambda = p.lambda;
    const double g0 = p.g0;
    const double beta = p.beta;
    if (!(lambda > 0.0)) {
        throw domain_error(
            "make_implicit_variance_family: lambda must be positive; got " +
            fmt_g(lambda));
    }
    if (!(g0 >= 0.5 && g0 < 1.0)) {
        throw domain_error("make_implicit_variance_family: g0 must lie in [1/2, 1); got " +
                           fmt_g(g0));
    }
    if (beta == 0.0) {
        throw domain_error(
            "make_implicit_variance_family: beta = 0 is the constant-variance case; "
            "use make_implicit_constant_variance");
    }
    if (!(beta > -lambda)) {
        throw domain_error(
            "make_implicit_variance_family: beta must exceed -lambda (got beta=" +
            fmt_g(beta) + ", lambda=" + fmt_g(lambda) +
            "); below it the implied density turns negative before G reaches 1");
    }

    const double c = beta + lambda;
    const double s0 = 1.0 - g0;
    const auto q = [beta, lambda](double x) { return beta * (2.0 * x - 1.0) + lambda; };
    const double q0 = q(g0);
    if (!(q0 > 0.0) || !(q(1.0) > 0.0)) {
        throw domain_error(
            "make_implicit_variance_family: 2 beta G - beta + lambda must stay "
            "positive on [g0, 1]; got " + fmt_g(q0) + " at g0 and " + fmt_g(q(1.0)) +
            " at 1");
    }

    // L(x) = ln((1-x)/(1-g0))/c + (lambda/(beta c)) ln(q(x)/q0); the law
    // satisfies L(G(t)) = -t.
    const auto L = [c, s0, q, q0, beta, lambda](double x) {
        return std::log((1.0 - x) / s0) / c +
               lambda / (beta * c) * std::log(q(x) / q0);
    };

    // The solve below assumes L strictly decreasing on [g0, 1); verify on a
    // sampling grid and reject pathological parameter combinations.
    double hi_limit = 1.0 - 1e-16;
    {
        const int kProbe = 129;
        double prev = 0.0;  // L(g0)
        for (int i = 1; i <= kProbe; ++i) {
            const double x = g0 + (1.0 - 1e-9 - g0) * static_cast<double>(i) /
                                      static_cast<double>(kProbe);
            const double cur = L(x);
            if (!(cur < prev)) {
                throw numeric_error(
                    "make_implicit_variance_family: implicit relation is not strictly "
                    "decreasing near x=" + fmt_g(x) + "; parameters outside the "
                    "family's domain of validity");
            }
            prev = cur;
        }
    }

    // Bounds on the non-exponential survival factor (q(x)/q0)^(-lambda/beta)
    // over the whole bracket; its extremes sit at the endpoints.
    const double f_end = std::pow(c / q0, -lambda / beta);
    const double f_min = std::min(1.0, f_end);
    const double f_max = std::max(1.0, f_end);

    ServiceModel m;
    m.label = "implicit-variance(lambda=" + fmt_g(lambda) + ",g0=" + fmt_g(g0) +
              ",beta=" + fmt_g(beta) + ")";
    m.cdf = [c, g0, s0, L, hi_limit, f_min, f_max](double t) {
        if (t <= 0.0) {
            return g0;
        }
        const double E = std::exp(-c * t);
        const double s_hi = s0 * E * f_max;
        // same representability cutoff as the constant-variance solve
        if (s_hi < 1e-14) {
            return 1.0;
        }
        const double s_lo = s0 * E * f_min;
        const auto F = [&L, t](double x) { return L(x) + t; };
        return solve_decreasing(F, g0, hi_limit, 1.0 - s_hi, 1.0 - s_lo);
    };
    const auto cdf = m.cdf;
    m.density = [cdf, q](double t) {
        if (t < 0.0) {
            return 0.0;
        }
        const double G = cdf(t);
        return (1.0 - G) * q(G) / (2.0 * G - 1.0);
    };
    m.quantile = [g0, L](double u) {
        if (u <= g0) {
            return 0.0;
        }
        return -L(u);
    };
    m.atom_at_zero = g0;
    m.mean = mean_by_quadrature(m.cdf, s0 * f_max, c);
    return m;
}

double hazard(const ServiceModel& model, double t) {
    if (t < 0.0) {
        throw domain_error("hazard: t must be non-negative");
    }
    if (!model.has_density()) {
        throw capability_error("hazard: " + model.label +
                               " has no density; hazard is undefined");
    }
    const double G = model.cdf(t);
    const double survival = 1.0 - G;
    if (survival <= 1e-300) {
        throw domain_error("hazard: G(t) = 1 at t=" + fmt_g(t) +
                           " for " + model.label + "; hazard undefined");
    }
    return model.density(t) / survival;
}

double moment(const ServiceModel& model, int n, const QuadratureSpec& spec) {
    if (n < 1) {
        throw domain_error("moment: order must be >= 1; got " + std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    double T = std::max(model.mean, 1.0);
    bool converged = false;
    for (int k = 0; k < 200; ++k) {
        const double bound = (1.0 - model.cdf(T)) * nd * std::pow(T, nd - 1.0) *
                             std::max(T, 1.0);
        if (bound < 0.1 * spec.abs_tol) {
            converged = true;
            break;
        }
        T *= 2.0;
        if (!std::isfinite(T)) {
            break;
        }
    }
    if (!converged) {
        throw numeric_error("moment: tail cutoff failed to converge for " + model.label);
    }
    const auto f = [&model, nd](double t) {
        return nd * std::pow(t, nd - 1.0) * (1.0 - model.cdf(t));
    };
    // Doubling segments keep the adaptive rule on intervals matched to the
    // integrand's local scale: one pass over [0, T] can step right over the
    // bulk when T is many times the mean, and edge behaviour at 0 stays
    // confined to a short first piece.
    return integrate_doubling(f, 0.0, T, spec, model.jumps);
}

std::pair<double, double> moment_bounds(double g0, double lambda, int n) {
    if (!(g0 > 0.5 && g0 < 1.0)) {
        throw domain_error("moment_bounds: g0 must lie in (1/2, 1); got " + fmt_g(g0));
    }
    if (!(lambda > 0.0)) {
        throw domain_error("moment_bounds: lambda must be positive; got " + fmt_g(lambda));
    }
    if (n < 1) {
        throw domain_error("moment_bounds: order must be >= 1; got " + std::to_string(n));
    }
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) {
        fact *= static_cast<double>(k);
    }
    const double s0 = 1.0 - g0;
    const double ln = std::pow(lambda, static_cast<double>(n));
    const double lower = s0 * fact * std::exp(-2.0 * s0) / ln;
    const double upper = s0 * fact / ((2.0 * g0 - 1.0) * ln);
    return {lower, upper};
}

double sample(const ServiceModel& model, double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw domain_error("sample: u must lie in [0, 1); got " + fmt_g(u));
    }
    if (u < model.atom_at_zero) {
        return 0.0;
    }
    if (model.has_quantile()) {
        return model.quantile(u);
    }
    double hi = std::max(model.mean, 1.0);
    int grow = 0;
    while (model.cdf(hi) < u) {
        hi *= 2.0;
        if (++grow > 200 || !std::isfinite(hi)) {
            throw numeric_error("sample: bracket growth failed for " + model.label);
        }
    }
    const auto F = [&model, u](double t) { return model.cdf(t) - u; };
    return find_root(F, 0.0, hi, 1e-12);
}

double tail_cutoff(const ServiceModel& model, double eps) {
    if (!(eps > 0.0)) {
        throw domain_error("tail_cutoff: eps must be positive");
    }
    double T = std::max(model.mean, 1.0);
    for (int k = 0; k < 200; ++k) {
        if (1.0 - model.cdf(T) < eps) {
            return T;
        }
        T *= 2.0;
        if (!std::isfinite(T)) {
            break;
        }
    }
    throw numeric_error("tail_cutoff: horizon growth failed to converge for " +
                        model.label);
}

}  // namespace mginf
