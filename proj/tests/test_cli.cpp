#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <string>

#include "holoflow/report.hpp"
#include "holoflow/scenario.hpp"

using namespace holoflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    return std::string((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    REQUIRE(os.good());
    os << text;
}

std::string parse_error_for(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected a config error for: " + text);
    return {};
}

// Run the installed CLI binary; returns its exit code.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(HOLOFLOW_CLI_PATH) + " " + args;
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

}  // namespace

TEST_CASE("config defaults come from the catalog entry") {
    RunConfig cfg = parse_config_text(R"({"model": "round_s2"})");
    REQUIRE(cfg.scenarios.size() == 1);
    const Scenario& sc = cfg.scenarios[0];
    REQUIRE(sc.name == "round_s2");
    REQUIRE(sc.theta0 == find_model("round_s2").theta_default);
    REQUIRE(sc.t0 == find_model("round_s2").t0_default);
    REQUIRE(sc.T == find_model("round_s2").T_default);
    REQUIRE(sc.grid == 5);
    REQUIRE(sc.checks == all_check_ids());
    REQUIRE(sc.loop_labels.size() == find_model("round_s2").loops.size());
    REQUIRE(cfg.report_path == "report.json");
    REQUIRE(cfg.summary_path == "summary.csv");
}

TEST_CASE("config fields override defaults and are validated") {
    RunConfig cfg = parse_config_text(R"({
        "name": "s", "model": "round_s2", "theta0": [1.5], "t0": 0.05, "T": 0.2,
        "grid": 7, "loops": ["circle"], "checks": ["flow_consistency"],
        "tolerances": {"flow_consistency.closed_form": 0.5}, "seed": 99,
        "report": "r.json", "summary": "s.csv"})");
    const Scenario& sc = cfg.scenarios[0];
    REQUIRE(sc.name == "s");
    REQUIRE(sc.theta0 == Vec{1.5});
    REQUIRE(sc.t0 == 0.05);
    REQUIRE(sc.T == 0.2);
    REQUIRE(sc.grid == 7);
    REQUIRE(sc.loop_labels == std::vector<std::string>{"circle"});
    REQUIRE(sc.checks == std::vector<std::string>{"flow_consistency"});
    REQUIRE(sc.tol_overrides.at("flow_consistency.closed_form") == 0.5);
    REQUIRE(sc.seed == 99);
    REQUIRE(sc.seed_explicit);
    REQUIRE(cfg.report_path == "r.json");
    REQUIRE(cfg.summary_path == "s.csv");
}

TEST_CASE("config errors carry field context") {
    REQUIRE_THAT(parse_error_for(R"({"model": "nope"})"),
                 Catch::Matchers::ContainsSubstring("$.model"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "theta0": [1, 2]})"),
                 Catch::Matchers::ContainsSubstring("theta0"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "t0": 0.3, "T": 0.2})"),
                 Catch::Matchers::ContainsSubstring("t0"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "checks": ["bogus"]})"),
                 Catch::Matchers::ContainsSubstring("checks[0]"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "loops": ["no_such"]})"),
                 Catch::Matchers::ContainsSubstring("loops[0]"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "typo_field": 1})"),
                 Catch::Matchers::ContainsSubstring("typo_field"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "tolerances": {"noDot": 1e-3}})"),
                 Catch::Matchers::ContainsSubstring("noDot"));
    REQUIRE_THAT(parse_error_for(R"({"model": "round_s2", "theta0": [-1.0]})"),
                 Catch::Matchers::ContainsSubstring("admissible"));
    REQUIRE_THAT(parse_error_for("{ not json"),
                 Catch::Matchers::ContainsSubstring("line 1"));
    REQUIRE_THAT(parse_error_for(R"({"scenarios": []})"),
                 Catch::Matchers::ContainsSubstring("scenarios"));
}

TEST_CASE("inline loops must be continuous and closed") {
    const std::string good = R"({
        "model": "flat_torus_2",
        "loops": [{"label": "around_x", "segments": [
            {"from": [0.2, 0.2], "to": [1.2, 0.2], "deck": "translate_x"}]}],
        "checks": ["holonomy_invariance"]})";
    RunConfig cfg = parse_config_text(good);
    REQUIRE(cfg.scenarios[0].loop_labels == std::vector<std::string>{"around_x"});
    // the deck pulls the endpoint back by one period onto the basepoint
    REQUIRE(cfg.scenarios[0].model.loops.back().label == "around_x");

    const std::string open_loop = R"({
        "model": "flat_torus_2",
        "loops": [{"label": "bad", "segments": [
            {"from": [0.2, 0.2], "to": [0.9, 0.2]}]}]})";
    REQUIRE_THAT(parse_error_for(open_loop),
                 Catch::Matchers::ContainsSubstring("does not close"));

    const std::string torn = R"({
        "model": "flat_torus_2",
        "loops": [{"label": "bad", "segments": [
            {"from": [0.2, 0.2], "to": [0.9, 0.2]},
            {"from": [0.5, 0.5], "to": [0.2, 0.2]}]}]})";
    REQUIRE_THAT(parse_error_for(torn),
                 Catch::Matchers::ContainsSubstring("continue"));

    const std::string bad_deck = R"({
        "model": "flat_torus_2",
        "loops": [{"label": "bad", "segments": [
            {"from": [0.2, 0.2], "to": [1.2, 0.2], "deck": "no_such_deck"}]}]})";
    REQUIRE_THAT(parse_error_for(bad_deck),
                 Catch::Matchers::ContainsSubstring("deck"));
}

TEST_CASE("translated deck holonomy through an inline loop is trivial on the flat torus") {
    RunConfig cfg = parse_config_text(R"({
        "model": "flat_torus_2",
        "loops": [{"label": "around_x", "segments": [
            {"from": [0.2, 0.2], "to": [1.2, 0.2], "deck": "translate_x"}]}],
        "checks": ["holonomy_invariance"]})");
    RunOutcome out = run_config(cfg);
    REQUIRE(out.results.size() == 1);
    REQUIRE(out.results[0].reports.size() == 1);
    REQUIRE(out.results[0].reports[0].verdict == "pass");
    REQUIRE(out.all_pass);
    REQUIRE_FALSE(out.extinct);
}

TEST_CASE("tolerance overrides and the global scale reach the checks") {
    RunConfig cfg = parse_config_text(R"({
        "model": "round_s2", "theta0": [1.0], "t0": 0.1, "T": 0.4,
        "checks": ["algebra_rank"],
        "tolerances": {"algebra_rank.generator_error": 1e-30}})");
    RunOutcome out = run_config(cfg);
    REQUIRE_FALSE(out.all_pass);
    const CheckReport& rep = out.results[0].reports[0];
    bool saw = false;
    for (const auto& r : rep.residuals)
        if (r.name == "generator_error") {
            saw = true;
            REQUIRE(r.tolerance == 1e-30);
            REQUIRE(r.value > 0.0);
        }
    REQUIRE(saw);

    // scaling every tolerance up by a huge factor turns the verdict back around
    RunOutcome relaxed = run_config(cfg, /*tolerance_scale=*/1e30);
    REQUIRE(relaxed.all_pass);
}

TEST_CASE("run_config flags extinction and still reports completed scenarios") {
    RunConfig cfg = parse_config_text(R"({"scenarios": [
        {"name": "ok", "model": "flat_torus_2", "checks": ["flow_consistency"]},
        {"name": "doomed", "model": "round_s2", "theta0": [1.0], "T": 0.6,
         "checks": ["flow_consistency"]}]})");
    RunOutcome out = run_config(cfg);
    REQUIRE(out.extinct);
    REQUIRE_THAT(out.extinct_message, Catch::Matchers::ContainsSubstring("doomed"));
    REQUIRE(out.results.size() == 2);
    REQUIRE(out.results[0].reports.size() == 1);
    REQUIRE(out.results[0].reports[0].verdict == "pass");
    REQUIRE(out.results[1].reports.empty());
}

TEST_CASE("report document carries the schema id and full residual rows") {
    RunConfig cfg = parse_config_text(R"({
        "model": "flat_torus_2", "checks": ["flow_consistency"]})");
    RunOutcome out = run_config(cfg);
    nlohmann::ordered_json doc = report_document(out.results);
    REQUIRE(doc["schema"] == "holoflow-report/1");
    REQUIRE(doc["reports"].is_array());
    REQUIRE(doc["reports"].size() == 1);
    const auto& rep = doc["reports"][0];
    REQUIRE(rep["scenario"] == "flat_torus_2");
    REQUIRE(rep["check_id"] == "flow_consistency");
    REQUIRE(rep["verdict"] == "pass");
    REQUIRE(rep["parameters"].contains("seed"));
    REQUIRE(rep["residuals"].size() >= 5);
    for (const auto& r : rep["residuals"]) {
        REQUIRE(r.contains("name"));
        REQUIRE(r.contains("value"));
        REQUIRE(r.contains("tolerance"));
        REQUIRE(r["verdict"] == "pass");
    }

    const std::string csv = report_csv_text(out.results);
    REQUIRE_THAT(csv, Catch::Matchers::StartsWith(
                          "scenario,check_id,residual,value,tolerance,verdict\n"));
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    REQUIRE(rows == 1 + rep["residuals"].size());
}

TEST_CASE("csv fields with delimiters are quoted") {
    REQUIRE(csv_field("plain") == "plain");
    REQUIRE(csv_field("a,b") == "\"a,b\"");
    REQUIRE(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("cli exit codes cover pass, fail, config error, and extinction") {
    const std::string dir = "cli_cases";
    std::system(("mkdir -p " + dir).c_str());

    spit(dir + "/pass.json",
         R"({"model": "flat_torus_2", "checks": ["flow_consistency"],
             "report": ")" + dir + R"(/pass_report.json",
             "summary": ")" + dir + R"(/pass_summary.csv"})");
    REQUIRE(run_cli("run " + dir + "/pass.json > /dev/null 2>&1") == 0);

    spit(dir + "/fail.json",
         R"({"model": "round_s2", "theta0": [1.0], "t0": 0.1, "T": 0.4,
             "checks": ["flow_consistency"],
             "tolerances": {"flow_consistency.closed_form": 1e-300},
             "report": ")" + dir + R"(/fail_report.json",
             "summary": ")" + dir + R"(/fail_summary.csv"})");
    REQUIRE(run_cli("run " + dir + "/fail.json > /dev/null 2>&1") == 1);

    spit(dir + "/bad.json", R"({"model": "flat_torus_2", "mystery": true})");
    REQUIRE(run_cli("run " + dir + "/bad.json > /dev/null 2>&1") == 2);
    REQUIRE(run_cli("run " + dir + "/missing_file.json > /dev/null 2>&1") == 2);

    spit(dir + "/extinct.json",
         R"({"model": "round_s2", "theta0": [1.0], "T": 0.6,
             "checks": ["flow_consistency"],
             "report": ")" + dir + R"(/extinct_report.json",
             "summary": ")" + dir + R"(/extinct_summary.csv"})");
    REQUIRE(run_cli("run " + dir + "/extinct.json > /dev/null 2>&1") == 3);
    // a partial (empty-body) report is still written
    REQUIRE_THAT(slurp(dir + "/extinct_report.json"),
                 Catch::Matchers::ContainsSubstring("holoflow-report/1"));
}

TEST_CASE("cli listing names every model with its descriptor") {
    const std::string dir = "cli_cases";
    std::system(("mkdir -p " + dir).c_str());
    REQUIRE(run_cli("list > " + dir + "/listing.txt 2>&1") == 0);
    const std::string listing = slurp(dir + "/listing.txt");
    std::size_t lines = 0;
    for (char c : listing)
        if (c == '\n') ++lines;
    REQUIRE(lines >= 8);
    REQUIRE_THAT(listing, Catch::Matchers::ContainsSubstring("klein_bottle"));
    REQUIRE_THAT(listing, Catch::Matchers::ContainsSubstring("z2_reflection"));
    REQUIRE_THAT(listing, Catch::Matchers::ContainsSubstring("kaehler"));
    REQUIRE_THAT(listing, Catch::Matchers::ContainsSubstring("closed_form=yes"));
}

TEST_CASE("cli reports are byte-identical for a fixed config and seed") {
    const std::string dir = "cli_cases";
    std::system(("mkdir -p " + dir).c_str());
    spit(dir + "/det.json",
         R"({"model": "round_s2", "theta0": [1.0], "T": 0.4, "t0": 0.1,
             "checks": ["flow_consistency", "algebra_rank"],
             "report": ")" + dir + R"(/det_report.json",
             "summary": ")" + dir + R"(/det_summary.csv"})");
    REQUIRE(run_cli("--seed 42 run " + dir + "/det.json > /dev/null 2>&1") == 0);
    const std::string rep1 = slurp(dir + "/det_report.json");
    const std::string csv1 = slurp(dir + "/det_summary.csv");
    REQUIRE(run_cli("--seed 42 --jobs 3 run " + dir + "/det.json > /dev/null 2>&1") == 0);
    REQUIRE(slurp(dir + "/det_report.json") == rep1);
    REQUIRE(slurp(dir + "/det_summary.csv") == csv1);
    REQUIRE_THAT(rep1, Catch::Matchers::ContainsSubstring("\"seed\": \"42\""));
}
