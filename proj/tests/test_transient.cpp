#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"
#include "mginf/transient.hpp"

using namespace mginf;

TEST_CASE("empty-origin law is Poisson with the accumulated-survival rate") {
    // deterministic service, unit arrival rate: Lambda(t) = min(t, alpha)
    const auto m = make_deterministic(2.0);
    const auto pmf = empty_origin_pmf(m, 1.0, 1.0);
    REQUIRE(pmf.probs.size() >= 3);
    CHECK(pmf.origin == TransientPmf::Origin::empty);
    CHECK(pmf.probs[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(pmf.probs[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(pmf.probs[2] == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("busy-origin law shifts by the initial customer") {
    const auto m = make_deterministic(2.0);
    // t < alpha: the starting service is still running, so N = 1 + Poisson(t)
    const auto pmf = busy_origin_pmf(m, 1.0, 1.0);
    CHECK(pmf.origin == TransientPmf::Origin::busy_period_start);
    CHECK(pmf.probs[0] == 0.0);
    CHECK(pmf.probs[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(pmf.probs[2] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("initial state splits by the atom at zero") {
    // at t = 0 the tagged service has length 0 with the atom's probability
    const auto m = make_zero_beta_model(1.0, 0.3);
    const auto pmf = busy_origin_pmf(m, 1.0, 0.0);
    CHECK(pmf.probs[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(pmf.probs[1] == doctest::Approx(0.7).epsilon(1e-14));
    // without an atom the tagged customer is present with certainty
    const auto e = make_exponential(1.0);
    const auto pe = busy_origin_pmf(e, 1.0, 0.0);
    CHECK(pe.probs[0] == 0.0);
    CHECK(pe.probs[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("probabilities and reported truncation sum to one") {
    const auto m = make_exponential(1.0);
    for (double t : {0.0, 0.5, 2.0, 10.0}) {
        const auto pmf = busy_origin_pmf(m, 2.0, t);
        const double total =
            std::accumulate(pmf.probs.begin(), pmf.probs.end(), 0.0) + pmf.truncation_mass;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("too small a truncation level raises, report-only tolerance does not") {
    const auto m = make_exponential(1.0);
    CHECK_THROWS_AS(busy_origin_pmf(m, 5.0, 3.0, 2), truncation_error);
    const auto pmf = busy_origin_pmf(m, 5.0, 3.0, 2, 1.0);
    REQUIRE(pmf.probs.size() == 3);
    CHECK(pmf.truncation_mass > 1e-3);
}

TEST_CASE("long-run law is Poisson with the offered load") {
    const auto m = make_exponential(1.0);
    const auto at40 = busy_origin_pmf(m, 1.0, 40.0);
    const auto lim = limit_pmf(1.0);
    for (std::size_t n = 0; n < std::min(at40.probs.size(), lim.probs.size()); ++n) {
        CHECK(at40.probs[n] == doctest::Approx(lim.probs[n]).epsilon(1e-8));
    }
    // Poisson(rho) explicitly
    CHECK(lim.probs[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(lim.probs[3] == doctest::Approx(std::exp(-1.0) / 6.0).epsilon(1e-12));
}

TEST_CASE("deterministic-service moments have piecewise closed forms") {
    const double lambda = 1.5, alpha = 2.0;
    const auto m = make_deterministic(alpha);
    const auto grid = linspace(0.1, 6.0, 30);
    const auto mean = mean_busy_origin(m, lambda, grid);
    const auto var = variance_busy_origin(m, lambda, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double mu = t < alpha ? 1.0 + lambda * t : lambda * alpha;
        const double v = t < alpha ? lambda * t : lambda * alpha;
        CHECK(mean.values[i] == doctest::Approx(mu).epsilon(1e-9));
        CHECK(var.values[i] == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("exponential-service mean relaxes exponentially") {
    const double lambda = 1.0, alpha = 0.5;  // rho = 1/2
    const double rho = lambda * alpha;
    const auto m = make_exponential(alpha);
    const auto grid = linspace(0.1, 5.0, 20);
    const auto mean = mean_busy_origin(m, lambda, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double truth = rho + (1.0 - rho) * std::exp(-grid[i] / alpha);
        CHECK(mean.values[i] == doctest::Approx(truth).epsilon(1e-9));
    }
    // unit-load special case: variance 1 - e^{-2t}, mean identically 1
    const auto m1 = make_exponential(1.0);
    const auto var = variance_busy_origin(m1, 1.0, grid);
    const auto mean1 = mean_busy_origin(m1, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(var.values[i] ==
              doctest::Approx(-std::expm1(-2.0 * grid[i])).epsilon(1e-9));
        CHECK(mean1.values[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("pmf moments match the moment curves") {
    const auto m = make_beta_constant_family({1.0, 1.0, 0.2});
    const auto grid = linspace(0.2, 4.0, 8);
    const auto pmfs = busy_origin_pmf_curve(m, 1.0, grid);
    const auto mean = mean_busy_origin(m, 1.0, grid);
    const auto var = variance_busy_origin(m, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t n = 0; n < pmfs[i].probs.size(); ++n) {
            m1 += static_cast<double>(n) * pmfs[i].probs[n];
            m2 += static_cast<double>(n) * static_cast<double>(n) * pmfs[i].probs[n];
        }
        CHECK(m1 == doctest::Approx(mean.values[i]).epsilon(1e-8));
        CHECK(m2 - m1 * m1 == doctest::Approx(var.values[i]).epsilon(1e-8));
    }
}

TEST_CASE("curve evaluation matches pointwise evaluation") {
    const auto m = make_exponential(1.0);
    const auto grid = linspace(0.0, 3.0, 7);
    const auto curve = busy_origin_pmf_curve(m, 1.0, grid);
    REQUIRE(curve.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto one = busy_origin_pmf(m, 1.0, grid[i]);
        REQUIRE(curve[i].probs.size() == one.probs.size());
        for (std::size_t n = 0; n < one.probs.size(); ++n) {
            CHECK(curve[i].probs[n] == doctest::Approx(one.probs[n]).epsilon(1e-11));
        }
    }
    // serial and parallel curve evaluation agree exactly
    const auto serial = busy_origin_pmf_curve(m, 1.0, grid, -1, 1e-9, {}, Exec::serial);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t n = 0; n < curve[i].probs.size(); ++n) {
            CHECK(curve[i].probs[n] == serial[i].probs[n]);
        }
    }
}

TEST_CASE("default truncation level grows with the load") {
    CHECK(default_n_max(1.0) >= 20);
    CHECK(default_n_max(100.0) >= 100 + 12 * 10);
    CHECK(default_n_max(0.0) >= 10);
}
