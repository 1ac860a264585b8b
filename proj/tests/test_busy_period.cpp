#include <cmath>
#include <vector>

#include "doctest.h"
#include "mginf/busy_period.hpp"
#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"

using namespace mginf;

TEST_CASE("closed-form busy-period CDF") {
    const double lambda = 1.0, rho = 1.0;
    // atom B(0) matches the service atom G(0) of the matching family
    const auto m = make_beta_constant_family({lambda, rho, 0.0});
    CHECK(busy_cdf_constant_beta(lambda, rho, 0.0, 0.0) ==
          doctest::Approx(m.cdf(0.0)).epsilon(1e-12));
    // explicit value: 1 - (1 - e^-1) e^{-e^-1 t}
    const double t = 2.0;
    const double truth = 1.0 - (1.0 - std::exp(-1.0)) * std::exp(-std::exp(-1.0) * t);
    CHECK(busy_cdf_constant_beta(lambda, rho, 0.0, t) == doctest::Approx(truth).epsilon(1e-13));
    // continuous at the upper generator edge
    const double beta_hi = lambda / (std::exp(rho) - 1.0);
    CHECK(busy_cdf_constant_beta(lambda, rho, beta_hi, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // degenerate lower edge: all mass at zero
    CHECK(busy_cdf_constant_beta(lambda, rho, -lambda, 0.0) == doctest::Approx(1.0));
    // outside the band
    CHECK_THROWS_AS(busy_cdf_constant_beta(lambda, rho, -1.2, 1.0), domain_error);
    CHECK_THROWS_AS(busy_cdf_constant_beta(lambda, rho, beta_hi + 0.1, 1.0), domain_error);
    CHECK_THROWS_AS(busy_cdf_constant_beta(lambda, rho, 0.0, -1.0), domain_error);
}

TEST_CASE("closed-form law object evaluates the same CDF") {
    const auto law = make_busy_closed_form(1.0, 0.8, -0.3);
    CHECK(law.source == BusyPeriodLaw::Source::closed_form);
    for (double t : {0.0, 0.5, 2.0, 10.0}) {
        CHECK(law.cdf(t) == doctest::Approx(busy_cdf_constant_beta(1.0, 0.8, -0.3, t)));
    }
    CHECK(law.atom_at_zero == doctest::Approx(law.cdf(0.0)));
}

TEST_CASE("mean busy period is (e^rho - 1)/lambda for every admissible generator") {
    const double lambda = 1.0, rho = 1.0;
    const double truth = (std::exp(rho) - 1.0) / lambda;
    const double beta_hi = lambda / (std::exp(rho) - 1.0);
    for (double beta : {-0.9, -0.5, 0.0, 0.3, beta_hi}) {
        CAPTURE(beta);
        CHECK(busy_mean(make_busy_closed_form(lambda, rho, beta)) ==
              doctest::Approx(truth).epsilon(1e-9));
    }
    // degenerate member: zero-length busy periods
    CHECK(busy_mean(make_busy_closed_form(lambda, rho, -lambda)) == doctest::Approx(0.0));
    // different load
    CHECK(busy_mean(make_busy_closed_form(2.0, 0.5, 0.0)) ==
          doctest::Approx((std::exp(0.5) - 1.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("convolution series reproduces the closed form") {
    const double lambda = 1.0, rho = 1.0, beta = 0.0;
    const auto m = make_beta_constant_family({lambda, rho, beta});
    const auto grid = linspace(0.0, 10.0, 2001);
    const auto law = busy_cdf_series(m, lambda, [](double) { return 0.0; }, grid, 128);
    CHECK(law.source == BusyPeriodLaw::Source::convolution_series);
    CHECK(law.atom_at_zero == doctest::Approx(m.cdf(0.0)).epsilon(1e-12));
    CHECK(law.series_terms > 5);
    double worst = 0.0;
    for (double t : linspace(0.0, 10.0, 101)) {
        worst = std::max(worst,
                         std::abs(law.cdf(t) - busy_cdf_constant_beta(lambda, rho, beta, t)));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("series mean integrates the survival over a long horizon") {
    const double lambda = 1.0, rho = 1.0;
    const auto m = make_beta_constant_family({lambda, rho, 0.0});
    const auto grid = linspace(0.0, 30.0, 4001);
    const auto law = busy_cdf_series(m, lambda, [](double) { return 0.0; }, grid, 128);
    CHECK(busy_mean(law) == doctest::Approx((std::exp(rho) - 1.0) / lambda).epsilon(2e-2));
}

TEST_CASE("series mean refuses a horizon that omits visible mass") {
    const auto m = make_beta_constant_family({1.0, 1.0, 0.0});
    const auto grid = linspace(0.0, 5.0, 501);
    const auto law = busy_cdf_series(m, 1.0, [](double) { return 0.0; }, grid, 128);
    CHECK_THROWS_AS(busy_mean(law), numeric_error);
}

TEST_CASE("series reports truncation when the term budget is too small") {
    const auto m = make_beta_constant_family({1.0, 1.0, 0.0});
    const auto grid = linspace(0.0, 10.0, 501);
    CHECK_THROWS_AS(
        busy_cdf_series(m, 1.0, [](double) { return 0.0; }, grid, 3, 1e-12, 1e-9),
        truncation_error);
}

TEST_CASE("series grid must be uniform from zero") {
    const auto m = make_beta_constant_family({1.0, 1.0, 0.0});
    const std::vector<double> bad = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(busy_cdf_series(m, 1.0, [](double) { return 0.0; }, bad),
                    shape_error);
}

TEST_CASE("series flags a generator outside the admissible band") {
    const auto m = make_beta_constant_family({1.0, 1.0, 0.0});
    const auto grid = linspace(0.0, 10.0, 201);
    CHECK_THROWS_AS(
        busy_cdf_series(m, 1.0, [](double) { return -1.5; }, grid),
        domain_error);
}

TEST_CASE("series and closed form agree for nonzero generators") {
    for (auto [lambda, rho, beta] :
         {std::tuple{1.0, 1.0, 0.3}, std::tuple{1.0, 0.5, -0.3}}) {
        const auto m = make_beta_constant_family({lambda, rho, beta});
        const auto grid = linspace(0.0, 10.0, 2001);
        const auto law =
            busy_cdf_series(m, lambda, [beta = beta](double) { return beta; }, grid, 128);
        double worst = 0.0;
        for (double t : linspace(0.0, 10.0, 101)) {
            worst = std::max(
                worst, std::abs(law.cdf(t) - busy_cdf_constant_beta(lambda, rho, beta, t)));
        }
        CAPTURE(lambda);
        CAPTURE(rho);
        CAPTURE(beta);
        CHECK(worst < 5e-3);
    }
}
