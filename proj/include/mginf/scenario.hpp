#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mginf/service_model.hpp"
#include "mginf/transient.hpp"

namespace mginf {

struct GridSpec {
    double start = 0.0;
    double stop = 10.0;
    int points = 50;

    std::vector<double> times() const;
};

// A self-describing experiment record: one service model, one arrival rate,
// one grid, plus per-command settings. Loaded from JSON; CLI flags override
// individual fields.
struct Scenario {
    std::string family;
    nlohmann::json params = nlohmann::json::object();
    double lambda = 1.0;
    GridSpec grid;
    int n_max = -1;  // -1: automatic truncation level

    StatKind monotone_kind = StatKind::mean;

    // sim settings
    std::optional<std::uint64_t> seed;
    std::int64_t replications = 100000;
    std::optional<double> horizon;  // defaults to grid.stop

    struct Busy {
        std::string form = "closed-form";  // "closed-form" | "series"
        std::optional<double> rho;         // defaults to lambda * model.mean
        double beta = 0.0;
        double horizon = 10.0;
        std::optional<double> step;        // defaults to min(mean/200, horizon/2000)
        int n_terms = 64;
    } busy;

    struct Compare {
        std::string target = "state";  // "state" | "busy-period"
        double z_threshold = 4.0;
        double ks_level = 0.01;
    } compare;
};

// Parses and validates the scenario record; unknown model families and
// malformed fields raise domain_error naming the offending constraint.
Scenario scenario_from_json(const nlohmann::json& j);

// Reads the JSON file at path (domain_error on unreadable/invalid files).
Scenario load_scenario(const std::string& path);

// Builds the scenario's service model. Family parameter "lambda" defaults to
// the scenario arrival rate for the families that are defined relative to it.
ServiceModel build_model(const Scenario& scenario);

}  // namespace mginf
