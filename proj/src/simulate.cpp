#include "mginf/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include "mginf/rng.hpp"

namespace mginf {

namespace {

constexpr double kZeroLength = 1e-9;  // busy lengths at or below count as the atom

void validate_config(const SimConfig& config, bool needs_grid, const char* where) {
    if (!(config.lambda > 0.0)) {
        throw domain_error(std::string(where) + ": lambda must be positive");
    }
    if (config.replications < 1) {
        throw domain_error(std::string(where) + ": need at least one replication");
    }
    if (needs_grid) {
        if (config.t_grid.empty()) {
            throw domain_error(std::string(where) + ": empty observation grid");
        }
        double prev = -1.0;
        for (double t : config.t_grid) {
            if (t < 0.0 || t < prev) {
                throw domain_error(std::string(where) +
                                   ": grid must be non-decreasing and non-negative");
            }
            prev = t;
        }
        if (config.horizon < config.t_grid.back()) {
            throw domain_error(std::string(where) +
                               ": horizon must cover the last grid instant");
        }
    }
}

double draw_unit(std::mt19937_64& eng) { return to_unit_interval(eng()); }

double draw_exponential_gap(std::mt19937_64& eng, double lambda) {
    return -std::log1p(-draw_unit(eng)) / lambda;
}

// Exact integer tallies; merging them is order-insensitive, which keeps the
// estimates identical whatever the thread count.
struct StateTally {
    std::vector<std::uint64_t> count;  // [instant][n <= n_max], row-major
    std::vector<std::uint64_t> s1, s2, s3, s4;

    explicit StateTally(std::size_t nt, std::size_t bins)
        : count(nt * bins, 0), s1(nt, 0), s2(nt, 0), s3(nt, 0), s4(nt, 0) {}

    void merge(const StateTally& other) {
        for (std::size_t i = 0; i < count.size(); ++i) {
            count[i] += other.count[i];
        }
        for (std::size_t i = 0; i < s1.size(); ++i) {
            s1[i] += other.s1[i];
            s2[i] += other.s2[i];
            s3[i] += other.s3[i];
            s4[i] += other.s4[i];
        }
    }
};

// One replication: the tagged customer arrives at t = 0, the Poisson stream
// follows, and N(t) is read off every grid instant. A customer occupies
// [arrival, arrival + service): zero-length services never register.
void run_state_replication(const SimConfig& config, const ServiceModel& model,
                           std::uint64_t rep, std::span<const double> grid,
                           std::vector<std::uint32_t>& occupancy, int n_max,
                           StateTally& tally) {
    std::mt19937_64 eng(substream_seed(config.seed, rep));
    std::fill(occupancy.begin(), occupancy.end(), 0u);

    const auto admit = [&](double arrival, double service) {
        if (service <= 0.0) {
            return;
        }
        const auto lo = std::lower_bound(grid.begin(), grid.end(), arrival);
        const auto hi = std::lower_bound(lo, grid.end(), arrival + service);
        for (auto it = lo; it != hi; ++it) {
            ++occupancy[static_cast<std::size_t>(it - grid.begin())];
        }
    };

    admit(0.0, sample(model, draw_unit(eng)));
    double t = 0.0;
    while (true) {
        t += draw_exponential_gap(eng, config.lambda);
        if (t > config.horizon) {
            break;
        }
        admit(t, sample(model, draw_unit(eng)));
    }

    const std::size_t bins = static_cast<std::size_t>(n_max) + 1;
    for (std::size_t i = 0; i < occupancy.size(); ++i) {
        const std::uint64_t n = occupancy[i];
        if (n < bins) {
            ++tally.count[i * bins + n];
        }
        const std::uint64_t n2 = n * n;
        tally.s1[i] += n;
        tally.s2[i] += n2;
        tally.s3[i] += n2 * n;
        tally.s4[i] += n2 * n2;
    }
}

SimEstimate pmf_estimate(std::uint64_t count, std::int64_t reps) {
    const double r = static_cast<double>(reps);
    const double p = static_cast<double>(count) / r;
    return {p, std::sqrt(std::max(0.0, p * (1.0 - p) / r)), reps};
}

}  // namespace

StateSimResult simulate_state(const SimConfig& config, const ServiceModel& model,
                              int n_max, Exec exec) {
    validate_config(config, true, "simulate_state");
    const int nm = n_max >= 0 ? n_max : default_n_max(config.lambda * model.mean);
    const std::size_t nt = config.t_grid.size();
    const std::size_t bins = static_cast<std::size_t>(nm) + 1;
    const std::span<const double> grid(config.t_grid);
    const std::int64_t reps = config.replications;

    StateTally total(nt, bins);
    if (exec == Exec::parallel) {
        // An exception escaping an OpenMP loop aborts the process, so capture
        // the first one and rethrow it after the region.
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
#pragma omp parallel
        {
            StateTally local(nt, bins);
            std::vector<std::uint32_t> occupancy(nt, 0u);
#pragma omp for schedule(static) nowait
            for (std::int64_t r = 0; r < reps; ++r) {
                if (failed.load(std::memory_order_relaxed)) {
                    continue;
                }
                try {
                    run_state_replication(config, model, static_cast<std::uint64_t>(r),
                                          grid, occupancy, nm, local);
                } catch (...) {
#pragma omp critical
                    {
                        if (!failed.exchange(true)) {
                            first_error = std::current_exception();
                        }
                    }
                }
            }
#pragma omp critical
            total.merge(local);
        }
        if (first_error) {
            std::rethrow_exception(first_error);
        }
    } else {
        std::vector<std::uint32_t> occupancy(nt, 0u);
        for (std::int64_t r = 0; r < reps; ++r) {
            run_state_replication(config, model, static_cast<std::uint64_t>(r), grid,
                                  occupancy, nm, total);
        }
    }

    StateSimResult out;
    out.t_grid = config.t_grid;
    out.n_max = nm;
    out.mean.resize(nt);
    out.variance.resize(nt);
    out.pmf.resize(nt);

    const double r = static_cast<double>(reps);
    for (std::size_t i = 0; i < nt; ++i) {
        const double m1 = static_cast<double>(total.s1[i]) / r;
        const double m2 = static_cast<double>(total.s2[i]) / r;
        const double m3 = static_cast<double>(total.s3[i]) / r;
        const double m4 = static_cast<double>(total.s4[i]) / r;

        // Unbiased across-replication variance and the usual large-sample
        // standard errors from exact raw sums.
        const double denom = reps > 1 ? r - 1.0 : 1.0;
        const double var = std::max(0.0, (m2 - m1 * m1) * r / denom);
        const double c4 = std::max(
            0.0, m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1);
        const double var_of_var =
            reps > 1 ? std::max(0.0, c4 - var * var * (r - 3.0) / (r - 1.0)) / r : 0.0;

        out.mean[i] = {m1, std::sqrt(var / r), reps};
        out.variance[i] = {var, std::sqrt(var_of_var), reps};
        out.pmf[i].resize(bins);
        for (std::size_t n = 0; n < bins; ++n) {
            out.pmf[i][n] = pmf_estimate(total.count[i * bins + n], reps);
        }
    }
    return out;
}

std::vector<double> simulate_busy_period(const SimConfig& config,
                                         const ServiceModel& model, Exec exec) {
    validate_config(config, false, "simulate_busy_period");
    const std::int64_t reps = config.replications;
    const double runaway = 1e9 / config.lambda;
    std::vector<double> lengths(static_cast<std::size_t>(reps), 0.0);
    std::atomic<bool> overflow{false};

    const auto one = [&](std::int64_t r) {
        std::mt19937_64 eng(substream_seed(config.seed, static_cast<std::uint64_t>(r)));
        double busy_end = sample(model, draw_unit(eng));
        double t = 0.0;
        while (true) {
            t += draw_exponential_gap(eng, config.lambda);
            if (t > busy_end) {
                break;
            }
            busy_end = std::max(busy_end, t + sample(model, draw_unit(eng)));
            if (busy_end > runaway) {
                overflow.store(true, std::memory_order_relaxed);
                return;
            }
        }
        lengths[static_cast<std::size_t>(r)] = busy_end;
    };

    if (exec == Exec::parallel) {
        // An exception escaping an OpenMP loop aborts the process, so capture
        // the first one and rethrow it after the region.
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
#pragma omp parallel for schedule(static)
        for (std::int64_t r = 0; r < reps; ++r) {
            if (failed.load(std::memory_order_relaxed)) {
                continue;
            }
            try {
                one(r);
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
        for (std::int64_t r = 0; r < reps; ++r) {
            one(r);
        }
    }
    if (overflow) {
        throw numeric_error("simulate_busy_period: a busy period exceeded 1e9/lambda; "
                            "the system appears unstable at these parameters");
    }
    return lengths;
}

namespace {

double z_score(double analytic, double estimate, double se) {
    const double diff = analytic - estimate;
    if (se == 0.0) {
        return std::abs(diff) <= 1e-12 ? 0.0
                                       : std::numeric_limits<double>::infinity();
    }
    return diff / se;
}

}  // namespace

StateComparison compare_state(const MomentCurve& mean_curve,
                              const MomentCurve& variance_curve,
                              const std::vector<TransientPmf>& pmfs,
                              const StateSimResult& sim, double z_threshold,
                              double min_expected_count) {
    const std::size_t nt = sim.t_grid.size();
    if (mean_curve.grid.size() != nt || variance_curve.grid.size() != nt ||
        pmfs.size() != nt) {
        throw shape_error("compare_state: analytic and simulated grids differ in size");
    }
    for (std::size_t i = 0; i < nt; ++i) {
        if (mean_curve.grid[i] != sim.t_grid[i] ||
            variance_curve.grid[i] != sim.t_grid[i]) {
            throw shape_error("compare_state: analytic and simulated grids differ");
        }
    }

    StateComparison cmp;
    cmp.z_threshold = z_threshold;
    cmp.min_expected_count = min_expected_count;
    const double reps = static_cast<double>(sim.mean.empty() ? 0 : sim.mean[0].replications);

    for (std::size_t i = 0; i < nt; ++i) {
        const double t = sim.t_grid[i];
        {
            const SimEstimate& e = sim.mean[i];
            const double z = z_score(mean_curve.values[i], e.value, e.std_error);
            cmp.rows.push_back({t, "mean", -1, mean_curve.values[i], e.value,
                                e.std_error, z});
        }
        {
            const SimEstimate& e = sim.variance[i];
            const double z = z_score(variance_curve.values[i], e.value, e.std_error);
            cmp.rows.push_back({t, "variance", -1, variance_curve.values[i], e.value,
                                e.std_error, z});
        }
        const std::vector<double>& probs = pmfs[i].probs;
        const std::size_t limit = std::min(probs.size(), sim.pmf[i].size());
        for (std::size_t n = 0; n < limit; ++n) {
            // Far-tail states have estimate 0 with zero standard error; a z
            // there is noise, so require a workable analytic expected count.
            if (probs[n] * reps < min_expected_count) {
                continue;
            }
            const SimEstimate& e = sim.pmf[i][n];
            const double z = z_score(probs[n], e.value, e.std_error);
            cmp.rows.push_back({t, "p", static_cast<int>(n), probs[n], e.value,
                                e.std_error, z});
        }
    }

    cmp.max_abs_z = 0.0;
    bool all_finite = true;
    for (const ComparisonRow& row : cmp.rows) {
        if (!std::isfinite(row.z)) {
            all_finite = false;
        }
        cmp.max_abs_z = std::max(cmp.max_abs_z, std::abs(row.z));
    }
    cmp.pass = all_finite && cmp.max_abs_z <= z_threshold;
    return cmp;
}

double ks_critical(double level, std::int64_t m) {
    if (!(level > 0.0 && level < 1.0)) {
        throw domain_error("ks_critical: level must lie in (0, 1)");
    }
    if (m < 1) {
        throw domain_error("ks_critical: need at least one observation");
    }
    return std::sqrt(-0.5 * std::log(level / 2.0)) / std::sqrt(static_cast<double>(m));
}

BusyComparison compare_busy(const BusyPeriodLaw& law, std::span<const double> lengths,
                            double ks_level, double z_threshold,
                            const QuadratureSpec& spec) {
    if (lengths.empty()) {
        throw domain_error("compare_busy: empty sample");
    }
    BusyComparison cmp;
    cmp.ks_level = ks_level;
    cmp.z_threshold = z_threshold;

    const double m = static_cast<double>(lengths.size());
    double sum = 0.0;
    double sum2 = 0.0;
    std::vector<double> continuous;
    continuous.reserve(lengths.size());
    for (double x : lengths) {
        sum += x;
        sum2 += x * x;
        if (x > kZeroLength) {
            continuous.push_back(x);
        }
    }
    const double mean_hat = sum / m;
    const double var_hat =
        lengths.size() > 1
            ? std::max(0.0, (sum2 - sum * sum / m) / (m - 1.0))
            : 0.0;

    cmp.mean_analytic = busy_mean(law, spec);
    cmp.mean_estimate = mean_hat;
    cmp.mean_std_error = std::sqrt(var_hat / m);
    cmp.mean_z = z_score(cmp.mean_analytic, cmp.mean_estimate, cmp.mean_std_error);

    const double atom_hat = (m - static_cast<double>(continuous.size())) / m;
    cmp.atom_analytic = law.atom_at_zero;
    cmp.atom_estimate = atom_hat;
    cmp.atom_std_error = std::sqrt(std::max(0.0, atom_hat * (1.0 - atom_hat) / m));
    cmp.atom_z = z_score(cmp.atom_analytic, cmp.atom_estimate, cmp.atom_std_error);

    // KS on the continuous part against the conditional CDF
    // (B(x) - atom) / (1 - atom).
    cmp.continuous_count = static_cast<std::int64_t>(continuous.size());
    if (!continuous.empty() && law.atom_at_zero < 1.0 - 1e-12) {
        std::sort(continuous.begin(), continuous.end());
        const double mc = static_cast<double>(continuous.size());
        const double atom = law.atom_at_zero;
        double d = 0.0;
        for (std::size_t i = 0; i < continuous.size(); ++i) {
            const double f = (law.cdf(continuous[i]) - atom) / (1.0 - atom);
            const double lo = static_cast<double>(i) / mc;
            const double hi = static_cast<double>(i + 1) / mc;
            d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
        }
        cmp.ks_stat = d;
        cmp.ks_threshold = ks_critical(ks_level, cmp.continuous_count);
    } else {
        cmp.ks_stat = 0.0;
        cmp.ks_threshold = 1.0;
    }

    cmp.pass = std::isfinite(cmp.mean_z) && std::isfinite(cmp.atom_z) &&
               std::abs(cmp.mean_z) <= z_threshold &&
               std::abs(cmp.atom_z) <= z_threshold && cmp.ks_stat <= cmp.ks_threshold;
    return cmp;
}

}  // namespace mginf
