#include <cmath>
#include <vector>

#include "doctest.h"
#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"

using namespace mginf;

TEST_CASE("adaptive quadrature on smooth integrands") {
    CHECK(integrate([](double t) { return std::exp(-t); }, 0.0, 5.0) ==
          doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-12));
    CHECK(integrate([](double t) { return t * t; }, 0.0, 3.0) ==
          doctest::Approx(9.0).epsilon(1e-12));
    // infinite upper limit uses the tail cutoff
    QuadratureSpec spec;
    spec.tail_cutoff = 60.0;
    CHECK(integrate([](double t) { return std::exp(-t); }, 0.0,
                    std::numeric_limits<double>::infinity(), spec) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature splits exactly at announced jumps") {
    // survival of a unit-length deterministic service: 1 on [0,1), 0 after
    auto surv = [](double t) { return t < 1.0 ? 1.0 : 0.0; };
    const std::vector<double> jumps = {1.0};
    CHECK(integrate(surv, 0.0, 4.0, {}, jumps) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate(surv, 0.0, 0.5, {}, jumps) == doctest::Approx(0.5).epsilon(1e-12));
    // jump outside the range must not disturb anything
    CHECK(integrate(surv, 2.0, 3.0, {}, jumps) == doctest::Approx(0.0));
}

TEST_CASE("root finding") {
    auto f = [](double x) { return x * x - 2.0; };
    CHECK(find_root(f, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // steep and flat regions mixed
    auto g = [](double x) { return std::exp(5.0 * x) - 3.0; };
    CHECK(find_root(g, -1.0, 1.0) == doctest::Approx(std::log(3.0) / 5.0).epsilon(1e-10));
    CHECK_THROWS_AS(find_root([](double) { return 1.0; }, 0.0, 1.0), bracket_error);
}

TEST_CASE("finite differences") {
    auto f = [](double t) { return t * t * t; };
    CHECK(finite_difference(f, 2.0, 1e-5) == doctest::Approx(12.0).epsilon(1e-8));
    // one-sided at the domain edge still converges to the derivative
    CHECK(finite_difference(f, 0.0, 1e-6) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("grid function construction and interpolation") {
    GridFunction f(0.5, {0.0, 1.0, 4.0});
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.25) == doctest::Approx(0.5));
    CHECK(f(0.75) == doctest::Approx(2.5));
    CHECK(f(10.0) == 4.0);  // clamps beyond the grid
    CHECK(f.back_time() == doctest::Approx(1.0));

    const std::vector<double> good = {0.0, 0.1, 0.2, 0.3};
    CHECK_NOTHROW(make_grid_function(good, {1, 2, 3, 4}));
    const std::vector<double> not_from_zero = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(make_grid_function(not_from_zero, {1, 2, 3}), shape_error);
    const std::vector<double> uneven = {0.0, 0.1, 0.25};
    CHECK_THROWS_AS(make_grid_function(uneven, {1, 2, 3}), shape_error);
}

TEST_CASE("discrete convolution matches the exponential closed form") {
    // (e^-t * e^-t)(t) = t e^-t
    const int n = 2001;
    const double h = 10.0 / (n - 1);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::exp(-i * h);
    GridFunction e(h, v);
    const GridFunction c = convolve(e, e, Exec::serial);
    REQUIRE(c.size() == e.size());
    CHECK(c.values[0] == 0.0);
    for (int i : {100, 500, 1500}) {
        const double t = i * h;
        CHECK(c.values[i] == doctest::Approx(t * std::exp(-t)).epsilon(1e-4));
    }
    // serial and parallel kernels agree bit for bit
    const GridFunction cp = convolve(e, e, Exec::parallel);
    for (int i = 0; i < n; ++i) CHECK(c.values[i] == cp.values[i]);
}

TEST_CASE("convolution validates shapes") {
    GridFunction a(0.1, {1.0, 1.0});
    GridFunction b(0.2, {1.0, 1.0});
    GridFunction c(0.1, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(convolve(a, b), shape_error);
    CHECK_THROWS_AS(convolve(a, c), shape_error);
}

TEST_CASE("cumulative tail integral of the exponential law") {
    const auto model = make_exponential(2.0);  // survival e^{-t/2}
    const auto grid = linspace(0.0, 8.0, 81);
    const auto serial = cumulative_tail_integral(model, grid, {}, Exec::serial);
    const auto parallel = cumulative_tail_integral(model, grid, {}, Exec::parallel);
    REQUIRE(serial.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double truth = 2.0 * (1.0 - std::exp(-grid[i] / 2.0));
        CHECK(serial[i] == doctest::Approx(truth).epsilon(1e-10));
        CHECK(serial[i] == parallel[i]);  // bit-identical
    }
}

TEST_CASE("linspace endpoints and spacing") {
    const auto g = linspace(1.0, 3.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 3.0);
    CHECK(g[2] == doctest::Approx(2.0));
    CHECK(linspace(7.0, 9.0, 1) == std::vector<double>{7.0});
}
