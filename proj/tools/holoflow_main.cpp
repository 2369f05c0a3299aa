// Command-line entry point: scenario-driven verification runs over the
// model catalog, plus a catalog listing. Exit codes: 0 all verdicts pass,
// 1 at least one verdict fails, 2 configuration/usage error, 3 the flow
// went extinct before the requested horizon (partial report written).

#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "holoflow/report.hpp"
#include "holoflow/scenario.hpp"

namespace {

int default_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

void print_listing() {
    for (const auto& M : holoflow::catalog()) {
        std::string line = M.name;
        line += "  dim=" + std::to_string(M.dim);
        line += "  holonomy=" + std::string(holoflow::family_name(M.holonomy.family));
        line += " (algebra_dim=" + std::to_string(M.holonomy.algebra_dim()) + ")";
        if (M.kaehler()) line += "  kaehler";
        line += "  closed_form=" + std::string(M.closed_form_flow ? "yes" : "no");
        line += "  loops=[";
        for (std::size_t i = 0; i < M.loops.size(); ++i) {
            if (i) line += ", ";
            line += M.loops[i].label;
        }
        line += "]";
        std::puts(line.c_str());
    }
}

int run_command(const std::string& config_path, double tolerance_scale, int jobs,
                bool seed_given, std::uint64_t seed) {
    holoflow::RunConfig cfg;
    try {
        cfg = holoflow::load_config(config_path);
    } catch (const holoflow::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    if (seed_given)
        for (auto& sc : cfg.scenarios) sc.seed = seed;

    holoflow::RunOutcome out = holoflow::run_config(cfg, tolerance_scale, jobs);

    try {
        holoflow::write_text_file(cfg.report_path, holoflow::report_json_text(out.results));
        holoflow::write_text_file(cfg.summary_path, holoflow::report_csv_text(out.results));
    } catch (const holoflow::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }

    int total = 0, passed = 0;
    for (const auto& sr : out.results)
        for (const auto& rep : sr.reports) {
            ++total;
            const bool ok = rep.verdict == "pass";
            passed += ok ? 1 : 0;
            std::string flags;
            for (const auto& f : rep.flags) flags += (flags.empty() ? ", flags: " : " ") + f;
            std::printf("[%s] %s: %s (%zu residuals%s)\n", ok ? "pass" : "FAIL",
                        sr.scenario.c_str(), rep.check_id.c_str(), rep.residuals.size(),
                        flags.c_str());
        }
    std::printf("%d/%d checks passed; report=%s summary=%s\n", passed, total,
                cfg.report_path.c_str(), cfg.summary_path.c_str());

    if (out.extinct) {
        std::fprintf(stderr, "flow extinction: %s\n", out.extinct_message.c_str());
        return 3;
    }
    return out.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ricci-flow holonomy verification laboratory"};
    app.require_subcommand(1);

    double tolerance_scale = 1.0;
    int jobs = default_jobs();
    std::int64_t seed = 0;
    app.add_option("--tolerance-scale", tolerance_scale,
                   "multiply every tolerance by this factor")
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", jobs, "worker threads for check execution")
        ->check(CLI::PositiveNumber);
    auto* seed_opt =
        app.add_option("--seed", seed, "override the sample-point seed of every scenario");
    seed_opt->check(CLI::NonNegativeNumber);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute the scenarios in a JSON config");
    run->add_option("config", config_path, "path to the scenario config")->required();
    run->fallthrough();

    CLI::App* list = app.add_subcommand("list", "print the model catalog");
    list->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list->parsed()) {
        print_listing();
        return 0;
    }
    return run_command(config_path, tolerance_scale, jobs, seed_opt->count() > 0,
                       std::uint64_t(seed));
}
