// Timing comparison between the serial reference kernels and the
// OpenMP-parallel ones.  Prints a small table; makes no assertions, since
// available core counts vary.
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#else
#include <chrono>
static double omp_get_wtime() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}
static int omp_get_max_threads() { return 1; }
#endif

#include "mginf/numerics.hpp"
#include "mginf/service_model.hpp"
#include "mginf/simulate.hpp"

namespace {

volatile double g_sink = 0;  // defeats dead-code elimination of timed bodies

template <typename F>
double time_seconds(F&& body) {
    const double start = omp_get_wtime();
    body();
    return omp_get_wtime() - start;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-28s %10.4f s %10.4f s %8.2fx\n", name, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    const auto model = mginf::make_exponential(1.0);

    {
        const int n = 20000;
        std::vector<double> va(n), vb(n);
        const double h = 20.0 / (n - 1);
        for (int i = 0; i < n; ++i) {
            va[i] = std::exp(-i * h);
            vb[i] = std::exp(-0.5 * i * h);
        }
        mginf::GridFunction a(h, va), b(h, vb);
        double sink = 0;
        const double ts = time_seconds([&] {
            sink += mginf::convolve(a, b, mginf::Exec::serial).values.back();
        });
        const double tp = time_seconds([&] {
            sink += mginf::convolve(a, b, mginf::Exec::parallel).values.back();
        });
        report("convolve (20k grid)", ts, tp);
        g_sink = g_sink + sink;
    }

    {
        const auto grid = mginf::linspace(0.0, 20.0, 4001);
        double sink = 0;
        const double ts = time_seconds([&] {
            sink += mginf::cumulative_tail_integral(model, grid, {}, mginf::Exec::serial).back();
        });
        const double tp = time_seconds([&] {
            sink += mginf::cumulative_tail_integral(model, grid, {}, mginf::Exec::parallel).back();
        });
        report("cumulative tail (4k cells)", ts, tp);
        g_sink = g_sink + sink;
    }

    {
        mginf::SimConfig config;
        config.lambda = 1.0;
        config.replications = 200000;
        config.seed = 12345;
        config.horizon = 8.0;
        config.t_grid = {0.5, 1.0, 2.0, 4.0, 8.0};
        double sink = 0;
        const double ts = time_seconds([&] {
            sink += mginf::simulate_state(config, model, 16, mginf::Exec::serial).mean.back().value;
        });
        const double tp = time_seconds([&] {
            sink += mginf::simulate_state(config, model, 16, mginf::Exec::parallel).mean.back().value;
        });
        report("simulate_state (2e5 reps)", ts, tp);
        g_sink = g_sink + sink;
    }

    return 0;
}
