#include "mginf/scenario.hpp"

#include <fstream>

namespace mginf {

namespace {

double get_number(const nlohmann::json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw domain_error(std::string(where) + ": missing field '" + key + "'");
    }
    if (!j.at(key).is_number()) {
        throw domain_error(std::string(where) + ": field '" + key +
                           "' must be a number");
    }
    return j.at(key).get<double>();
}

double get_number_or(const nlohmann::json& j, const char* key, double fallback,
                     const char* where) {
    return j.contains(key) ? get_number(j, key, where) : fallback;
}

}  // namespace

std::vector<double> GridSpec::times() const {
    return linspace(start, stop, points);
}

Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw domain_error("scenario: top level must be a JSON object");
    }
    Scenario s;

    if (!j.contains("model") || !j.at("model").is_object()) {
        throw domain_error("scenario: an object field 'model' is required");
    }
    const nlohmann::json& model = j.at("model");
    if (!model.contains("family") || !model.at("family").is_string()) {
        throw domain_error("scenario: model.family must be a string");
    }
    s.family = model.at("family").get<std::string>();
    if (model.contains("params")) {
        if (!model.at("params").is_object()) {
            throw domain_error("scenario: model.params must be an object");
        }
        s.params = model.at("params");
    }

    s.lambda = get_number_or(j, "lambda", s.lambda, "scenario");
    if (!(s.lambda > 0.0)) {
        throw domain_error("scenario: lambda must be positive");
    }

    if (j.contains("grid")) {
        const nlohmann::json& g = j.at("grid");
        if (!g.is_object()) {
            throw domain_error("scenario: grid must be an object {start, stop, points}");
        }
        s.grid.start = get_number_or(g, "start", s.grid.start, "scenario.grid");
        s.grid.stop = get_number_or(g, "stop", s.grid.stop, "scenario.grid");
        s.grid.points =
            static_cast<int>(get_number_or(g, "points", s.grid.points, "scenario.grid"));
    }
    if (s.grid.points < 1) {
        throw domain_error("scenario: grid.points must be >= 1");
    }
    if (!(s.grid.stop >= s.grid.start) || s.grid.start < 0.0) {
        throw domain_error("scenario: grid must satisfy 0 <= start <= stop");
    }

    if (j.contains("n_max")) {
        s.n_max = static_cast<int>(get_number(j, "n_max", "scenario"));
        if (s.n_max < 0) {
            throw domain_error("scenario: n_max must be >= 0");
        }
    }

    if (j.contains("monotone")) {
        const nlohmann::json& m = j.at("monotone");
        if (!m.is_object() || !m.contains("kind") || !m.at("kind").is_string()) {
            throw domain_error("scenario: monotone must be {\"kind\": \"mean\"|\"variance\"}");
        }
        const std::string kind = m.at("kind").get<std::string>();
        if (kind == "mean") {
            s.monotone_kind = StatKind::mean;
        } else if (kind == "variance") {
            s.monotone_kind = StatKind::variance;
        } else {
            throw domain_error("scenario: monotone.kind must be 'mean' or 'variance'");
        }
    }

    if (j.contains("sim")) {
        const nlohmann::json& sim = j.at("sim");
        if (!sim.is_object()) {
            throw domain_error("scenario: sim must be an object");
        }
        if (sim.contains("seed")) {
            if (!sim.at("seed").is_number_unsigned() && !sim.at("seed").is_number_integer()) {
                throw domain_error("scenario: sim.seed must be a non-negative integer");
            }
            const auto seed = sim.at("seed").get<std::int64_t>();
            if (seed < 0) {
                throw domain_error("scenario: sim.seed must be non-negative");
            }
            s.seed = static_cast<std::uint64_t>(seed);
        }
        if (sim.contains("replications")) {
            s.replications = sim.at("replications").get<std::int64_t>();
        }
        if (sim.contains("horizon")) {
            s.horizon = get_number(sim, "horizon", "scenario.sim");
        }
    }
    if (s.replications < 1) {
        throw domain_error("scenario: sim.replications must be >= 1");
    }

    if (j.contains("busy")) {
        const nlohmann::json& b = j.at("busy");
        if (!b.is_object()) {
            throw domain_error("scenario: busy must be an object");
        }
        if (b.contains("form")) {
            s.busy.form = b.at("form").get<std::string>();
        }
        if (s.busy.form != "closed-form" && s.busy.form != "series") {
            throw domain_error("scenario: busy.form must be 'closed-form' or 'series'");
        }
        if (b.contains("rho")) {
            s.busy.rho = get_number(b, "rho", "scenario.busy");
        }
        s.busy.beta = get_number_or(b, "beta", s.busy.beta, "scenario.busy");
        s.busy.horizon = get_number_or(b, "horizon", s.busy.horizon, "scenario.busy");
        if (!(s.busy.horizon > 0.0)) {
            throw domain_error("scenario: busy.horizon must be positive");
        }
        if (b.contains("step")) {
            const double step = get_number(b, "step", "scenario.busy");
            if (!(step > 0.0) || step > s.busy.horizon) {
                throw domain_error("scenario: busy.step must lie in (0, horizon]");
            }
            s.busy.step = step;
        }
        if (b.contains("n_terms")) {
            s.busy.n_terms = static_cast<int>(get_number(b, "n_terms", "scenario.busy"));
            if (s.busy.n_terms < 1) {
                throw domain_error("scenario: busy.n_terms must be >= 1");
            }
        }
    }

    if (j.contains("compare")) {
        const nlohmann::json& c = j.at("compare");
        if (!c.is_object()) {
            throw domain_error("scenario: compare must be an object");
        }
        if (c.contains("target")) {
            s.compare.target = c.at("target").get<std::string>();
        }
        if (s.compare.target != "state" && s.compare.target != "busy-period") {
            throw domain_error("scenario: compare.target must be 'state' or 'busy-period'");
        }
        s.compare.z_threshold =
            get_number_or(c, "z_threshold", s.compare.z_threshold, "scenario.compare");
        if (!(s.compare.z_threshold > 0.0)) {
            throw domain_error("scenario: compare.z_threshold must be positive");
        }
        s.compare.ks_level =
            get_number_or(c, "ks_level", s.compare.ks_level, "scenario.compare");
        if (!(s.compare.ks_level > 0.0 && s.compare.ks_level < 1.0)) {
            throw domain_error("scenario: compare.ks_level must lie in (0, 1)");
        }
    }

    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw domain_error("scenario: cannot open file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw domain_error("scenario: invalid JSON in '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

ServiceModel build_model(const Scenario& scenario) {
    const nlohmann::json& p = scenario.params;
    const char* where = "scenario.model.params";
    const std::string& family = scenario.family;

    if (family == "deterministic") {
        return make_deterministic(get_number(p, "alpha", where));
    }
    if (family == "exponential") {
        return make_exponential(get_number(p, "alpha", where));
    }
    if (family == "beta-constant") {
        BetaConstantFamilyParams bp;
        bp.lambda = get_number_or(p, "lambda", scenario.lambda, where);
        bp.rho = get_number(p, "rho", where);
        bp.beta = get_number(p, "beta", where);
        return make_beta_constant_family(bp);
    }
    if (family == "zero-beta") {
        return make_zero_beta_model(get_number_or(p, "lambda", scenario.lambda, where),
                                    get_number(p, "g0", where));
    }
    if (family == "implicit-constant-variance") {
        return make_implicit_constant_variance(
            get_number_or(p, "lambda", scenario.lambda, where),
            get_number(p, "g0", where));
    }
    if (family == "beta-lambda-variance") {
        return make_beta_lambda_variance_model(
            get_number_or(p, "lambda", scenario.lambda, where));
    }
    if (family == "implicit-variance") {
        ImplicitVarianceParams ip;
        ip.lambda = get_number_or(p, "lambda", scenario.lambda, where);
        ip.g0 = get_number(p, "g0", where);
        ip.beta = get_number(p, "beta", where);
        return make_implicit_variance_family(ip);
    }
    throw domain_error(
        "scenario: unknown model family '" + family +
        "'; expected one of deterministic, exponential, beta-constant, zero-beta, "
        "implicit-constant-variance, beta-lambda-variance, implicit-variance");
}

}  // namespace mginf
