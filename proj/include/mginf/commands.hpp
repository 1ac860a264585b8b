#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mginf/scenario.hpp"
#include "mginf/table.hpp"

namespace mginf {

// Service-law table: t, G, g (blank where undefined), h (blank where undefined).
Table cmd_dist(const Scenario& scenario);

// Busy-origin state law: rows (t, n, p) for n = 0..n_max plus one trailing
// (t, "truncation", mass) row per instant.
Table cmd_transient(const Scenario& scenario);

// Busy-origin moments: rows (t, mean, variance).
Table cmd_moments(const Scenario& scenario);

// Hazard-condition sweep; condition_holds reports whether violations exist.
nlohmann::json cmd_check_monotone(const Scenario& scenario, bool& condition_holds);

struct BusyCmdOutput {
    Table table;              // rows (t, B)
    nlohmann::json sidecar;   // atom, form parameters, series diagnostics
};
BusyCmdOutput cmd_busy_period(const Scenario& scenario);

// Simulation estimates: rows (t, stat, n, value, std_error).
Table cmd_simulate(const Scenario& scenario);

// Engine-vs-simulator comparison report; pass reflects the z/KS verdict.
nlohmann::json cmd_compare(const Scenario& scenario, bool& pass);

// Parses argv (without the program name), runs the subcommand, writes results
// to `out` or the --out file (busy-period sidecar to `err` or FILE.meta.json).
// Returns the process exit code: 0 success / 1 condition violated or
// comparison failed / 2 validation error / 3 numeric failure.
int run_command_line(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err);

}  // namespace mginf
