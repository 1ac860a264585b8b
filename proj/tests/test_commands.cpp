#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mginf/commands.hpp"
#include "mginf/scenario.hpp"

using namespace mginf;

namespace {

std::filesystem::path write_scenario(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_command_line(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

const std::string kExpScenario = R"({
  "model": {"family": "exponential", "params": {"alpha": 1.0}},
  "lambda": 1.0,
  "grid": {"start": 0.0, "stop": 1.0, "points": 2}
})";

}  // namespace

TEST_CASE("scenario parsing and model construction") {
    const auto j = nlohmann::json::parse(kExpScenario);
    const Scenario s = scenario_from_json(j);
    CHECK(s.family == "exponential");
    CHECK(s.lambda == 1.0);
    CHECK(s.grid.points == 2);
    const auto m = build_model(s);
    CHECK(m.mean == doctest::Approx(1.0));

    nlohmann::json bad = j;
    bad["model"]["family"] = "no-such-family";
    CHECK_THROWS_AS(build_model(scenario_from_json(bad)), domain_error);
}

TEST_CASE("service table command emits the documented columns and values") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    std::string out;
    CHECK(run({"dist", "--scenario", path.string()}, &out) == 0);
    std::istringstream lines(out);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    CHECK(header == "t,G,g,h");
    CHECK(row0 == "0,0,1,1");
    CHECK(row1.substr(0, 10) == "1,0.632120");
    CHECK(row1.substr(row1.size() - 2) == ",1");
}

TEST_CASE("laws without a density leave g and h blank") {
    const auto path = write_scenario("cmd_det.json", R"({
      "model": {"family": "deterministic", "params": {"alpha": 2.0}},
      "lambda": 1.0,
      "grid": {"start": 1.0, "stop": 3.0, "points": 2}
    })");
    std::string out;
    CHECK(run({"dist", "--scenario", path.string()}, &out) == 0);
    std::istringstream lines(out);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    CHECK(row0 == "1,0,,");
    CHECK(row1 == "3,1,,");
}

TEST_CASE("moments header is stable") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    std::string out;
    CHECK(run({"moments", "--scenario", path.string()}, &out) == 0);
    CHECK(out.substr(0, out.find('\n')) == "t,mean,variance");
}

TEST_CASE("state table carries one truncation row per instant") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    std::string out;
    CHECK(run({"transient", "--scenario", path.string(), "--n-max", "6"}, &out) == 0);
    int truncation_rows = 0, state_rows = 0;
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,n,p");
    while (std::getline(lines, line)) {
        if (line.find(",truncation,") != std::string::npos) {
            ++truncation_rows;
        } else {
            ++state_rows;
        }
    }
    CHECK(truncation_rows == 2);  // one per grid instant
    CHECK(state_rows == 2 * 7);   // n = 0..6 per instant
}

TEST_CASE("grid flag overrides the scenario grid") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    std::string out;
    CHECK(run({"moments", "--scenario", path.string(), "--grid", "0:4:5"}, &out) == 0);
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    double first_t = -1.0;
    while (std::getline(lines, line)) {
        if (rows == 0) first_t = std::stod(line.substr(0, line.find(',')));
        ++rows;
    }
    CHECK(rows == 5);
    CHECK(first_t == 0.0);
    // malformed grid specifications are CLI errors
    CHECK(run({"moments", "--scenario", path.string(), "--grid", "0:4"}) == 2);
    CHECK(run({"moments", "--scenario", path.string(), "--grid", "0:4:5:9"}) == 2);
}

TEST_CASE("JSON output mirrors the CSV table") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    std::string out;
    CHECK(run({"dist", "--scenario", path.string(), "--format", "json"}, &out) == 0);
    const auto j = nlohmann::json::parse(out);
    REQUIRE(j.contains("columns"));
    REQUIRE(j.contains("rows"));
    CHECK(j["columns"] == nlohmann::json({"t", "G", "g", "h"}));
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0][1].get<double>() == 0.0);
}

TEST_CASE("results can be written to a file") {
    const auto path = write_scenario("cmd_exp.json", kExpScenario);
    const auto out_path = std::filesystem::temp_directory_path() / "cmd_dist_out.csv";
    std::filesystem::remove(out_path);
    std::string out;
    CHECK(run({"dist", "--scenario", path.string(), "--out", out_path.string()}, &out) == 0);
    CHECK(out.empty());
    std::ifstream in(out_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,G,g,h");
}

TEST_CASE("busy-period command writes a metadata sidecar next to the table") {
    const auto path = write_scenario("cmd_busy.json", R"({
      "model": {"family": "beta-constant", "params": {"lambda": 1.0, "rho": 1.0, "beta": 0.0}},
      "lambda": 1.0,
      "grid": {"start": 0.0, "stop": 10.0, "points": 3},
      "busy": {"form": "closed-form", "rho": 1.0, "beta": 0.0}
    })");
    std::string out, err;
    CHECK(run({"busy-period", "--scenario", path.string()}, &out, &err) == 0);
    CHECK(out.substr(0, out.find('\n')) == "t,B");
    const auto meta = nlohmann::json::parse(err);
    CHECK(meta["form"] == "closed-form");
    CHECK(meta["atom"].get<double>() == doctest::Approx(std::exp(-1.0)));

    const auto out_path = std::filesystem::temp_directory_path() / "busy_out.csv";
    const auto meta_path = out_path.string() + ".meta.json";
    std::filesystem::remove(out_path);
    std::filesystem::remove(meta_path);
    CHECK(run({"busy-period", "--scenario", path.string(), "--out", out_path.string()}) == 0);
    CHECK(std::filesystem::exists(out_path));
    CHECK(std::filesystem::exists(meta_path));
}

TEST_CASE("monotonicity verdict drives the exit code") {
    const auto hold = write_scenario("cmd_mono_hold.json", R"({
      "model": {"family": "exponential", "params": {"alpha": 1.0}},
      "lambda": 1.0,
      "grid": {"start": 0.25, "stop": 2.0, "points": 4},
      "monotone": {"kind": "mean"}
    })");
    std::string out;
    CHECK(run({"check-monotone", "--scenario", hold.string()}, &out) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["condition_holds_everywhere"] == true);

    const auto fail = write_scenario("cmd_mono_fail.json", R"({
      "model": {"family": "exponential", "params": {"alpha": 0.5}},
      "lambda": 1.0,
      "grid": {"start": 0.25, "stop": 2.0, "points": 4},
      "monotone": {"kind": "mean"}
    })");
    CHECK(run({"check-monotone", "--scenario", fail.string()}, &out) == 1);
    j = nlohmann::json::parse(out);
    CHECK(j["condition_holds_everywhere"] == false);
    CHECK(j["violations"].size() == 4);
}

TEST_CASE("validation problems exit with code 2") {
    CHECK(run({"dist", "--scenario", "/nonexistent/file.json"}) == 2);
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({"dist"}) == 2);  // --scenario is required
    const auto bad_json = write_scenario("cmd_bad.json", "{ not json");
    CHECK(run({"dist", "--scenario", bad_json.string()}) == 2);
    const auto bad_family = write_scenario("cmd_badfam.json", R"({
      "model": {"family": "weibull", "params": {}}, "lambda": 1.0
    })");
    CHECK(run({"dist", "--scenario", bad_family.string()}) == 2);
    const auto bad_domain = write_scenario("cmd_baddom.json", R"({
      "model": {"family": "exponential", "params": {"alpha": -1.0}}, "lambda": 1.0
    })");
    CHECK(run({"dist", "--scenario", bad_domain.string()}) == 2);
    const auto exp = write_scenario("cmd_exp.json", kExpScenario);
    CHECK(run({"dist", "--scenario", exp.string(), "--format", "xml"}) == 2);
}

TEST_CASE("numeric failures exit with code 3") {
    const auto path = write_scenario("cmd_busy_short.json", R"({
      "model": {"family": "beta-constant", "params": {"lambda": 1.0, "rho": 1.0, "beta": 0.0}},
      "lambda": 1.0,
      "busy": {"form": "series", "beta": 0.0, "horizon": 10.0, "n_terms": 1}
    })");
    std::string out, err;
    CHECK(run({"busy-period", "--scenario", path.string()}, &out, &err) == 3);
    CHECK(err.find("error") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    std::string out;
    CHECK(run({"--help"}, &out) == 0);
    CHECK(out.find("dist") != std::string::npos);
    CHECK(run({"dist", "--help"}, &out) == 0);
}

TEST_CASE("simulation commands repeat byte for byte") {
    const auto path = write_scenario("cmd_sim.json", R"({
      "model": {"family": "exponential", "params": {"alpha": 1.0}},
      "lambda": 1.0,
      "grid": {"start": 0.5, "stop": 2.0, "points": 2},
      "n_max": 6,
      "sim": {"seed": 42, "replications": 5000, "horizon": 2.0}
    })");
    std::string first, second;
    CHECK(run({"simulate", "--scenario", path.string()}, &first) == 0);
    CHECK(run({"simulate", "--scenario", path.string()}, &second) == 0);
    CHECK(first == second);
    CHECK(first.substr(0, first.find('\n')) == "t,stat,n,value,std_error");
    // the seed flag overrides the scenario and changes the stream
    std::string other;
    CHECK(run({"simulate", "--scenario", path.string(), "--seed", "43"}, &other) == 0);
    CHECK(first != other);
    // a missing seed is a validation error
    const auto unseeded = write_scenario("cmd_sim_noseed.json", R"({
      "model": {"family": "exponential", "params": {"alpha": 1.0}},
      "lambda": 1.0,
      "grid": {"start": 0.5, "stop": 2.0, "points": 2},
      "sim": {"replications": 100, "horizon": 2.0}
    })");
    CHECK(run({"simulate", "--scenario", unseeded.string()}) == 2);
    CHECK(run({"simulate", "--scenario", unseeded.string(), "--seed", "7"}) == 0);
}

TEST_CASE("comparison verdict drives the exit code") {
    const auto path = write_scenario("cmd_cmp.json", R"({
      "model": {"family": "exponential", "params": {"alpha": 1.0}},
      "lambda": 1.0,
      "grid": {"start": 0.5, "stop": 2.0, "points": 2},
      "n_max": 8,
      "sim": {"seed": 42, "replications": 20000, "horizon": 2.0},
      "compare": {"target": "state"}
    })");
    std::string out;
    CHECK(run({"compare", "--scenario", path.string()}, &out) == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j["pass"] == true);
    CHECK(j["max_abs_z"].get<double>() < 4.0);
    // replications flag trims the run
    std::string quick;
    CHECK(run({"compare", "--scenario", path.string(), "--replications", "2000"},
              &quick) == 0);
    CHECK(nlohmann::json::parse(quick)["replications"] == 2000);
}
