#include "mginf/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "mginf/busy_period.hpp"
#include "mginf/monotonicity.hpp"
#include "mginf/simulate.hpp"

namespace mginf {

namespace {

Cell number_or_blank(double v) {
    if (!std::isfinite(v)) {
        return std::monostate{};
    }
    return v;
}

std::uint64_t require_seed(const Scenario& s, const char* where) {
    if (!s.seed) {
        throw domain_error(std::string(where) +
                           ": a seed is required for reproducible runs; set --seed "
                           "or sim.seed in the scenario");
    }
    return *s.seed;
}

SimConfig state_sim_config(const Scenario& s) {
    SimConfig config;
    config.lambda = s.lambda;
    config.replications = s.replications;
    config.seed = require_seed(s, "simulate");
    config.t_grid = s.grid.times();
    config.horizon = s.horizon.value_or(s.grid.stop);
    return config;
}

double busy_step(const Scenario& s, const ServiceModel& model) {
    if (s.busy.step) {
        return *s.busy.step;
    }
    return std::min(std::max(model.mean, 1e-6) / 200.0, s.busy.horizon / 2000.0);
}

nlohmann::json monotone_report_json(const MonotonicityReport& rep) {
    nlohmann::json j;
    j["kind"] = rep.kind == StatKind::mean ? "mean" : "variance";
    j["applicable"] = rep.applicable;
    if (!rep.applicable) {
        j["inapplicable_reason"] = rep.inapplicable_reason;
    }
    j["condition_holds_everywhere"] = rep.condition_holds_everywhere;
    j["derivative_min"] = rep.derivative_min;
    j["points_checked"] = rep.points_checked;
    j["points_auto_satisfied"] = rep.points_auto_satisfied;
    nlohmann::json violations = nlohmann::json::array();
    for (const MonotonicityViolation& v : rep.violations) {
        violations.push_back(
            {{"t", v.t}, {"hazard", v.hazard_value}, {"threshold", v.threshold}});
    }
    j["violations"] = std::move(violations);
    return j;
}

}  // namespace

Table cmd_dist(const Scenario& scenario) {
    const ServiceModel model = build_model(scenario);
    Table table;
    table.columns = {"t", "G", "g", "h"};
    for (double t : scenario.grid.times()) {
        std::vector<Cell> row;
        row.emplace_back(t);
        const double G = model.cdf(t);
        row.emplace_back(G);
        if (model.has_density()) {
            row.emplace_back(number_or_blank(model.density(t)));
            if (G < 1.0 - 1e-12) {
                row.emplace_back(number_or_blank(model.density(t) / (1.0 - G)));
            } else {
                row.emplace_back(std::monostate{});
            }
        } else {
            row.emplace_back(std::monostate{});
            row.emplace_back(std::monostate{});
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table cmd_transient(const Scenario& scenario) {
    const ServiceModel model = build_model(scenario);
    const std::vector<double> times = scenario.grid.times();
    // The table reports whatever mass lies beyond n_max instead of failing,
    // so an explicitly chosen truncation level is always honoured.
    const std::vector<TransientPmf> pmfs =
        busy_origin_pmf_curve(model, scenario.lambda, times, scenario.n_max, 1.0);
    Table table;
    table.columns = {"t", "n", "p"};
    for (const TransientPmf& pmf : pmfs) {
        for (std::size_t n = 0; n < pmf.probs.size(); ++n) {
            table.rows.push_back(
                {Cell(pmf.t), Cell(static_cast<std::int64_t>(n)), Cell(pmf.probs[n])});
        }
        table.rows.push_back(
            {Cell(pmf.t), Cell(std::string("truncation")), Cell(pmf.truncation_mass)});
    }
    return table;
}

Table cmd_moments(const Scenario& scenario) {
    const ServiceModel model = build_model(scenario);
    const std::vector<double> times = scenario.grid.times();
    const MomentCurve mean = mean_busy_origin(model, scenario.lambda, times);
    const MomentCurve variance = variance_busy_origin(model, scenario.lambda, times);
    Table table;
    table.columns = {"t", "mean", "variance"};
    for (std::size_t i = 0; i < times.size(); ++i) {
        table.rows.push_back(
            {Cell(times[i]), Cell(mean.values[i]), Cell(variance.values[i])});
    }
    return table;
}

nlohmann::json cmd_check_monotone(const Scenario& scenario, bool& condition_holds) {
    const ServiceModel model = build_model(scenario);
    const std::vector<double> times = scenario.grid.times();
    const MonotonicityReport rep =
        scenario.monotone_kind == StatKind::mean
            ? check_mean_monotone(model, scenario.lambda, times)
            : check_variance_monotone(model, scenario.lambda, times);
    condition_holds = rep.violations.empty();
    nlohmann::json j = monotone_report_json(rep);
    j["model"] = model.label;
    j["lambda"] = scenario.lambda;
    return j;
}

BusyCmdOutput cmd_busy_period(const Scenario& scenario) {
    const ServiceModel model = build_model(scenario);
    const double lambda = scenario.lambda;
    BusyCmdOutput out;
    out.table.columns = {"t", "B"};

    if (scenario.busy.form == "closed-form") {
        const double rho = scenario.busy.rho.value_or(lambda * model.mean);
        const BusyPeriodLaw law = make_busy_closed_form(lambda, rho, scenario.busy.beta);
        for (double t : scenario.grid.times()) {
            out.table.rows.push_back({Cell(t), Cell(law.cdf(t))});
        }
        out.sidecar = {{"form", "closed-form"},
                       {"atom", law.atom_at_zero},
                       {"lambda", lambda},
                       {"rho", rho},
                       {"beta", scenario.busy.beta}};
        return out;
    }

    const double h = busy_step(scenario, model);
    const auto n_cells = static_cast<std::size_t>(std::ceil(scenario.busy.horizon / h));
    std::vector<double> grid(n_cells + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = h * static_cast<double>(i);
    }
    const double beta = scenario.busy.beta;
    const BusyPeriodLaw law = busy_cdf_series(
        model, lambda, [beta](double) { return beta; }, grid, scenario.busy.n_terms);
    for (std::size_t i = 0; i < law.grid_cdf.size(); ++i) {
        out.table.rows.push_back(
            {Cell(law.grid_cdf.time_at(i)), Cell(law.grid_cdf.values[i])});
    }
    out.sidecar = {{"form", "series"},
                   {"atom", law.atom_at_zero},
                   {"lambda", lambda},
                   {"beta", beta},
                   {"step", h},
                   {"horizon", scenario.busy.horizon},
                   {"series_terms", law.series_terms},
                   {"last_term_sup", law.last_term_sup}};
    return out;
}

Table cmd_simulate(const Scenario& scenario) {
    const ServiceModel model = build_model(scenario);
    const SimConfig config = state_sim_config(scenario);
    const StateSimResult sim = simulate_state(config, model, scenario.n_max);
    Table table;
    table.columns = {"t", "stat", "n", "value", "std_error"};
    for (std::size_t i = 0; i < sim.t_grid.size(); ++i) {
        const double t = sim.t_grid[i];
        table.rows.push_back({Cell(t), Cell(std::string("mean")), Cell(std::monostate{}),
                              Cell(sim.mean[i].value), Cell(sim.mean[i].std_error)});
        table.rows.push_back({Cell(t), Cell(std::string("variance")),
                              Cell(std::monostate{}), Cell(sim.variance[i].value),
                              Cell(sim.variance[i].std_error)});
        for (std::size_t n = 0; n < sim.pmf[i].size(); ++n) {
            table.rows.push_back({Cell(t), Cell(std::string("p")),
                                  Cell(static_cast<std::int64_t>(n)),
                                  Cell(sim.pmf[i][n].value),
                                  Cell(sim.pmf[i][n].std_error)});
        }
    }
    return table;
}

nlohmann::json cmd_compare(const Scenario& scenario, bool& pass) {
    const ServiceModel model = build_model(scenario);
    const double lambda = scenario.lambda;

    if (scenario.compare.target == "state") {
        SimConfig config = state_sim_config(scenario);
        const int nm = scenario.n_max >= 0 ? scenario.n_max
                                           : default_n_max(lambda * model.mean);
        const std::vector<double> times = config.t_grid;
        const MomentCurve mean = mean_busy_origin(model, lambda, times);
        const MomentCurve variance = variance_busy_origin(model, lambda, times);
        // Entries up to n_max are exact whatever mass lies beyond, so the
        // comparison tolerates truncation rather than failing on it.
        const std::vector<TransientPmf> pmfs =
            busy_origin_pmf_curve(model, lambda, times, nm, 1.0);
        const StateSimResult sim = simulate_state(config, model, nm);
        const StateComparison cmp = compare_state(mean, variance, pmfs, sim,
                                                  scenario.compare.z_threshold);
        pass = cmp.pass;

        nlohmann::json rows = nlohmann::json::array();
        for (const ComparisonRow& row : cmp.rows) {
            nlohmann::json r = {{"t", row.t},           {"stat", row.stat},
                                {"analytic", row.analytic}, {"estimate", row.estimate},
                                {"std_error", row.std_error}, {"z", row.z}};
            if (row.n >= 0) {
                r["n"] = row.n;
            }
            rows.push_back(std::move(r));
        }
        return nlohmann::json{{"target", "state"},
                              {"model", model.label},
                              {"lambda", lambda},
                              {"replications", scenario.replications},
                              {"seed", *scenario.seed},
                              {"z_threshold", cmp.z_threshold},
                              {"min_expected_count", cmp.min_expected_count},
                              {"max_abs_z", cmp.max_abs_z},
                              {"pass", cmp.pass},
                              {"rows", std::move(rows)}};
    }

    // busy-period target
    SimConfig config;
    config.lambda = lambda;
    config.replications = scenario.replications;
    config.seed = require_seed(scenario, "compare");
    const std::vector<double> lengths = simulate_busy_period(config, model);

    BusyPeriodLaw law;
    if (scenario.busy.form == "closed-form") {
        const double rho = scenario.busy.rho.value_or(lambda * model.mean);
        law = make_busy_closed_form(lambda, rho, scenario.busy.beta);
    } else {
        const double h = busy_step(scenario, model);
        const auto n_cells =
            static_cast<std::size_t>(std::ceil(scenario.busy.horizon / h));
        std::vector<double> grid(n_cells + 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid[i] = h * static_cast<double>(i);
        }
        const double beta = scenario.busy.beta;
        law = busy_cdf_series(model, lambda, [beta](double) { return beta; }, grid,
                              scenario.busy.n_terms);
    }
    const BusyComparison cmp =
        compare_busy(law, lengths, scenario.compare.ks_level,
                     scenario.compare.z_threshold);
    pass = cmp.pass;
    return nlohmann::json{{"target", "busy-period"},
                          {"model", model.label},
                          {"lambda", lambda},
                          {"replications", scenario.replications},
                          {"seed", *scenario.seed},
                          {"z_threshold", cmp.z_threshold},
                          {"mean", {{"analytic", cmp.mean_analytic},
                                    {"estimate", cmp.mean_estimate},
                                    {"std_error", cmp.mean_std_error},
                                    {"z", cmp.mean_z}}},
                          {"atom", {{"analytic", cmp.atom_analytic},
                                    {"estimate", cmp.atom_estimate},
                                    {"std_error", cmp.atom_std_error},
                                    {"z", cmp.atom_z}}},
                          {"ks", {{"stat", cmp.ks_stat},
                                  {"threshold", cmp.ks_threshold},
                                  {"level", cmp.ks_level},
                                  {"continuous_count", cmp.continuous_count}}},
                          {"pass", cmp.pass}};
}

namespace {

struct CliFlags {
    std::string scenario_path;
    std::string out_path;
    std::string grid;
    std::string format = "csv";
    std::int64_t seed = -1;
    std::int64_t replications = -1;
    int n_max = -2;  // -2: not given (since -1 means "automatic" in scenarios)
};

void apply_flag_overrides(Scenario& s, const CliFlags& flags) {
    if (!flags.grid.empty()) {
        double start = 0.0;
        double stop = 0.0;
        int points = 0;
        char extra = 0;
        if (std::sscanf(flags.grid.c_str(), "%lf:%lf:%d%c", &start, &stop, &points,
                        &extra) != 3) {
            throw domain_error("--grid must have the form start:stop:points");
        }
        s.grid = GridSpec{start, stop, points};
        if (s.grid.points < 1 || !(s.grid.stop >= s.grid.start) || s.grid.start < 0.0) {
            throw domain_error("--grid must satisfy 0 <= start <= stop and points >= 1");
        }
    }
    if (flags.seed >= 0) {
        s.seed = static_cast<std::uint64_t>(flags.seed);
    }
    if (flags.replications >= 0) {
        if (flags.replications < 1) {
            throw domain_error("--replications must be >= 1");
        }
        s.replications = flags.replications;
    }
    if (flags.n_max != -2) {
        if (flags.n_max < 0) {
            throw domain_error("--n-max must be >= 0");
        }
        s.n_max = flags.n_max;
    }
}

void write_text(const std::string& text, const std::string& out_path,
                std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        throw domain_error("cannot open output file '" + out_path + "'");
    }
    file << text;
}

std::string render_table(const Table& table, const std::string& format) {
    if (format == "json") {
        return table_to_json(table).dump(2) + "\n";
    }
    return to_csv(table);
}

}  // namespace

int run_command_line(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err) {
    CLI::App app{"transient analysis of the M|G|inf queue"};
    app.require_subcommand(1);

    CliFlags flags;
    const auto add_common = [&flags](CLI::App* cmd) {
        cmd->add_option("--scenario", flags.scenario_path, "scenario JSON file")
            ->required();
        cmd->add_option("--out", flags.out_path, "output file (default stdout)");
        cmd->add_option("--seed", flags.seed, "RNG seed (overrides scenario)");
        cmd->add_option("--replications", flags.replications,
                        "simulation replications (overrides scenario)");
        cmd->add_option("--grid", flags.grid, "time grid start:stop:points");
        cmd->add_option("--n-max", flags.n_max, "state truncation level");
        cmd->add_option("--format", flags.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* dist = app.add_subcommand("dist", "service-law table: t, G, g, h");
    CLI::App* transient =
        app.add_subcommand("transient", "busy-origin state probabilities");
    CLI::App* moments = app.add_subcommand("moments", "busy-origin mean and variance");
    CLI::App* check_monotone =
        app.add_subcommand("check-monotone", "hazard-condition monotonicity report");
    CLI::App* busy_period =
        app.add_subcommand("busy-period", "busy-period length distribution");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo state estimates");
    CLI::App* compare =
        app.add_subcommand("compare", "engine-vs-simulation agreement report");
    for (CLI::App* cmd :
         {dist, transient, moments, check_monotone, busy_period, simulate, compare}) {
        add_common(cmd);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        Scenario scenario = load_scenario(flags.scenario_path);
        apply_flag_overrides(scenario, flags);

        if (dist->parsed()) {
            write_text(render_table(cmd_dist(scenario), flags.format), flags.out_path,
                       out);
            return 0;
        }
        if (transient->parsed()) {
            write_text(render_table(cmd_transient(scenario), flags.format),
                       flags.out_path, out);
            return 0;
        }
        if (moments->parsed()) {
            write_text(render_table(cmd_moments(scenario), flags.format),
                       flags.out_path, out);
            return 0;
        }
        if (check_monotone->parsed()) {
            bool holds = false;
            const nlohmann::json report = cmd_check_monotone(scenario, holds);
            write_text(report.dump(2) + "\n", flags.out_path, out);
            return holds ? 0 : 1;
        }
        if (busy_period->parsed()) {
            const BusyCmdOutput result = cmd_busy_period(scenario);
            write_text(render_table(result.table, flags.format), flags.out_path, out);
            const std::string sidecar = result.sidecar.dump(2) + "\n";
            if (flags.out_path.empty()) {
                err << sidecar;
            } else {
                write_text(sidecar, flags.out_path + ".meta.json", out);
            }
            return 0;
        }
        if (simulate->parsed()) {
            write_text(render_table(cmd_simulate(scenario), flags.format),
                       flags.out_path, out);
            return 0;
        }
        if (compare->parsed()) {
            bool pass = false;
            const nlohmann::json report = cmd_compare(scenario, pass);
            write_text(report.dump(2) + "\n", flags.out_path, out);
            return pass ? 0 : 1;
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const numeric_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace mginf
