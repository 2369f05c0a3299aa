#pragma once

// Scenario configs: JSON descriptions of which model to flow, which loops
// and checks to run, tolerance overrides, and report destinations. Parsing
// validates every field against the catalog and reports failures with field
// context; execution fans independent checks out over a bounded worker pool
// and merges reports through pre-indexed slots so output order never
// depends on scheduling.

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "holoflow/catalog.hpp"
#include "holoflow/checks.hpp"
#include "holoflow/report.hpp"

namespace holoflow {

inline const std::vector<std::string>& all_check_ids() {
    static const std::vector<std::string> ids = {
        "flow_consistency",   "algebra_rank",        "transport_rate",
        "loop_rate_algebra",  "holonomy_invariance", "structure_constancy",
    };
    return ids;
}

struct Scenario {
    std::string name;
    ManifoldModel model;  // local copy; inline loops are appended to it
    Vec theta0;
    double t0 = 0.0;
    double T = 0.0;
    int grid = 5;
    std::vector<std::string> loop_labels;
    std::vector<std::string> checks;
    std::map<std::string, double> tol_overrides;
    std::uint64_t seed = 12345;
    bool seed_explicit = false;
};

struct RunConfig {
    std::vector<Scenario> scenarios;
    std::string report_path = "report.json";
    std::string summary_path = "summary.csv";
};

namespace detail {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config error at " + where + ": " + what);
}

inline void require_known_keys(const Json& obj, const std::string& where,
                               const std::vector<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) fail(where, "unknown field '" + it.key() + "'");
    }
}

inline double get_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

inline Vec get_vector(const Json& j, const std::string& where, std::size_t want) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    Vec v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
    if (want != 0 && v.size() != want)
        fail(where, "expected " + std::to_string(want) + " entries, got " +
                        std::to_string(v.size()));
    return v;
}

inline int deck_index_by_label(const ManifoldModel& M, const std::string& label,
                               const std::string& where) {
    for (std::size_t i = 0; i < M.decks.size(); ++i)
        if (M.decks[i].label == label) return int(i);
    fail(where, "unknown deck transform '" + label + "' on model " + M.name);
}

// Inline loop spec: {"label": ..., "segments": [{"from": [...], "to": [...],
// "deck": "label"?}, ...]}. Segments are straight chart lines. A deck entry
// identifies the segment's endpoint with the next starting point across a
// chart seam: deck.map(next_start) must equal the current endpoint, and the
// final segment must return to the first starting point the same way.
inline NamedLoop parse_inline_loop(const Json& j, const ManifoldModel& M,
                                   const std::string& where) {
    if (!j.is_object()) fail(where, "expected a loop label or an inline loop object");
    require_known_keys(j, where, {"label", "segments"});
    if (!j.contains("label") || !j["label"].is_string())
        fail(where, "inline loop needs a string 'label'");
    NamedLoop loop;
    loop.label = j["label"].get<std::string>();
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
        fail(where, "inline loop needs a non-empty 'segments' array");

    const std::size_t dim = std::size_t(M.dim);
    const Json& segs = j["segments"];
    std::vector<Vec> starts, ends;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string sw = where + ".segments[" + std::to_string(i) + "]";
        if (!segs[i].is_object()) fail(sw, "expected an object");
        require_known_keys(segs[i], sw, {"from", "to", "deck"});
        if (!segs[i].contains("from") || !segs[i].contains("to"))
            fail(sw, "segment needs 'from' and 'to' chart points");
        Vec a = get_vector(segs[i]["from"], sw + ".from", dim);
        Vec b = get_vector(segs[i]["to"], sw + ".to", dim);
        if (!M.in_domain(a)) fail(sw + ".from", "point outside the chart domain box");
        if (!M.in_domain(b)) fail(sw + ".to", "point outside the chart domain box");

        Vec d = vec_sub(b, a);
        Segment seg;
        seg.pos = [a, d](double u) { return vec_add(a, vec_scale(u, d)); };
        seg.vel = [d](double) { return d; };
        loop.path.segments.push_back(std::move(seg));

        int junction = -1;
        if (segs[i].contains("deck")) {
            if (!segs[i]["deck"].is_string()) fail(sw + ".deck", "expected a deck label");
            junction =
                deck_index_by_label(M, segs[i]["deck"].get<std::string>(), sw + ".deck");
        }
        loop.path.junctions.push_back(junction);
        starts.push_back(std::move(a));
        ends.push_back(std::move(b));
    }
    loop.path.basepoint = starts.front();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const bool last = i + 1 == segs.size();
        Vec next = last ? loop.path.basepoint : starts[i + 1];
        const int junction = loop.path.junctions[i];
        if (junction >= 0) next = M.decks[std::size_t(junction)].map(next);
        if (vec_norm_inf(vec_sub(next, ends[i])) > 1e-9) {
            const std::string sw = where + ".segments[" + std::to_string(i) + "]";
            if (last)
                fail(where, "loop does not close: the deck image of the starting point "
                            "misses the final endpoint");
            fail(sw, "segment does not continue: the deck image of the next starting "
                     "point misses this endpoint");
        }
    }
    return loop;
}

inline Scenario parse_scenario(const Json& j, const std::string& where, bool top_level) {
    if (!j.is_object()) fail(where, "expected a scenario object");
    std::vector<std::string> known = {"name",  "model", "theta0",     "t0",   "T",
                                      "grid",  "loops", "checks",     "tolerances",
                                      "seed"};
    if (top_level) {
        known.push_back("report");
        known.push_back("summary");
    }
    require_known_keys(j, where, known);

    if (!j.contains("model") || !j["model"].is_string())
        fail(where, "scenario needs a string 'model'");
    const std::string model_name = j["model"].get<std::string>();
    Scenario sc;
    try {
        sc.model = find_model(model_name);
    } catch (const ConfigError&) {
        fail(where + ".model", "unknown model '" + model_name + "'");
    }
    sc.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>()
                                                          : model_name;
    if (j.contains("name") && !j["name"].is_string()) fail(where + ".name", "expected a string");

    sc.theta0 = sc.model.theta_default;
    if (j.contains("theta0"))
        sc.theta0 = get_vector(j["theta0"], where + ".theta0", sc.model.theta_default.size());
    if (!sc.model.admissible(sc.theta0))
        fail(where + ".theta0", "initial coefficients are outside the admissible region");

    sc.t0 = sc.model.t0_default;
    sc.T = sc.model.T_default;
    if (j.contains("t0")) sc.t0 = get_number(j["t0"], where + ".t0");
    if (j.contains("T")) sc.T = get_number(j["T"], where + ".T");
    if (!(sc.T > 0.0)) fail(where + ".T", "horizon must be positive");
    if (!(sc.t0 >= 0.0 && sc.t0 <= sc.T))
        fail(where + ".t0", "anchor time must satisfy 0 <= t0 <= T");

    if (j.contains("grid")) {
        if (!j["grid"].is_number_integer() || j["grid"].get<int>() < 2)
            fail(where + ".grid", "expected an integer >= 2");
        sc.grid = j["grid"].get<int>();
    }

    if (j.contains("loops")) {
        if (!j["loops"].is_array()) fail(where + ".loops", "expected an array");
        const Json& ls = j["loops"];
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const std::string lw = where + ".loops[" + std::to_string(i) + "]";
            std::string label;
            if (ls[i].is_string()) {
                label = ls[i].get<std::string>();
                bool found = false;
                for (const auto& nl : sc.model.loops)
                    if (nl.label == label) {
                        found = true;
                        break;
                    }
                if (!found)
                    fail(lw, "model " + sc.model.name + " has no loop labeled '" + label +
                                 "'");
            } else {
                NamedLoop nl = parse_inline_loop(ls[i], sc.model, lw);
                label = nl.label;
                sc.model.loops.push_back(std::move(nl));
            }
            for (const auto& seen : sc.loop_labels)
                if (seen == label) fail(lw, "duplicate loop label '" + label + "'");
            sc.loop_labels.push_back(label);
        }
    } else {
        for (const auto& nl : sc.model.loops) sc.loop_labels.push_back(nl.label);
    }

    if (j.contains("checks") && !(j["checks"].is_string() && j["checks"] == "all")) {
        if (!j["checks"].is_array())
            fail(where + ".checks", "expected \"all\" or an array of check ids");
        const Json& cs = j["checks"];
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string cw = where + ".checks[" + std::to_string(i) + "]";
            if (!cs[i].is_string()) fail(cw, "expected a check id string");
            const std::string id = cs[i].get<std::string>();
            bool known_id = false;
            for (const auto& k : all_check_ids())
                if (k == id) {
                    known_id = true;
                    break;
                }
            if (!known_id) fail(cw, "unknown check id '" + id + "'");
            for (const auto& seen : sc.checks)
                if (seen == id) fail(cw, "duplicate check id '" + id + "'");
            sc.checks.push_back(id);
        }
        if (sc.checks.empty()) fail(where + ".checks", "check list is empty");
    } else {
        sc.checks = all_check_ids();
    }

    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object())
            fail(where + ".tolerances", "expected an object of check_id.residual -> value");
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
            const std::string tw = where + ".tolerances." + it.key();
            if (it.key().find('.') == std::string::npos)
                fail(tw, "override keys use the form check_id.residual");
            if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
                fail(tw, "expected a positive number");
            sc.tol_overrides[it.key()] = it.value().get<double>();
        }
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            fail(where + ".seed", "expected a non-negative integer");
        sc.seed = std::uint64_t(j["seed"].get<std::int64_t>());
        sc.seed_explicit = true;
    }
    return sc;
}

inline std::string get_path(const Json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(std::string("$.") + key, "expected a file path string");
    return j[key].get<std::string>();
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    detail::Json j;
    try {
        j = detail::Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("config parse error at line " + std::to_string(line) + ": " +
                          e.what());
    }
    if (!j.is_object()) detail::fail("$", "top level must be an object");

    RunConfig cfg;
    cfg.report_path = detail::get_path(j, "report", cfg.report_path);
    cfg.summary_path = detail::get_path(j, "summary", cfg.summary_path);
    if (j.contains("scenarios")) {
        detail::require_known_keys(j, "$", {"scenarios", "report", "summary"});
        if (!j["scenarios"].is_array() || j["scenarios"].empty())
            detail::fail("$.scenarios", "expected a non-empty array");
        for (std::size_t i = 0; i < j["scenarios"].size(); ++i)
            cfg.scenarios.push_back(detail::parse_scenario(
                j["scenarios"][i], "$.scenarios[" + std::to_string(i) + "]", false));
    } else {
        cfg.scenarios.push_back(detail::parse_scenario(j, "$", true));
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

inline CheckReport run_one_check(const Scenario& sc, const FlowState& fs,
                                 const std::string& id, const ToleranceTable& tt) {
    const std::vector<double> grid = report_grid(sc.t0, sc.T, sc.grid);
    if (id == "flow_consistency") return check_flow_consistency(sc.model, fs, sc.seed, tt);
    if (id == "algebra_rank") return check_algebra_rank(sc.model, fs, tt);
    if (id == "transport_rate") return check_transport_rate(sc.model, fs, tt);
    if (id == "loop_rate_algebra")
        return check_loop_rate_algebra(sc.model, fs, grid, sc.loop_labels, tt);
    if (id == "holonomy_invariance")
        return check_holonomy_invariance(sc.model, fs, grid, sc.loop_labels, tt);
    if (id == "structure_constancy")
        return check_structure_constancy(sc.model, fs, grid, tt);
    throw ConfigError("unknown check id '" + id + "'");
}

struct RunOutcome {
    std::vector<ScenarioResult> results;
    bool all_pass = true;
    bool extinct = false;
    std::string extinct_message;
};

// Execute every (scenario, check) job. Jobs are independent; with jobs > 1
// they are distributed over a worker pool, and results land in pre-assigned
// slots so the merged report is identical regardless of scheduling.
inline RunOutcome run_config(const RunConfig& cfg, double tolerance_scale = 1.0,
                             int jobs = 1) {
    RunOutcome out;
    const std::size_t ns = cfg.scenarios.size();
    out.results.resize(ns);
    std::vector<std::optional<FlowState>> flows(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const Scenario& sc = cfg.scenarios[i];
        out.results[i].scenario = sc.name;
        try {
            flows[i] = integrate_flow(sc.model, sc.theta0, sc.t0, sc.T);
        } catch (const ExtinctionError& e) {
            out.extinct = true;
            if (!out.extinct_message.empty()) out.extinct_message += "; ";
            out.extinct_message += sc.name + ": " + e.what();
        }
    }

    struct Job {
        std::size_t si, ci;
    };
    std::vector<Job> queue;
    for (std::size_t i = 0; i < ns; ++i) {
        if (!flows[i]) continue;
        out.results[i].reports.resize(cfg.scenarios[i].checks.size());
        for (std::size_t c = 0; c < cfg.scenarios[i].checks.size(); ++c)
            queue.push_back({i, c});
    }

    std::vector<std::string> job_errors(queue.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= queue.size()) break;
            const Job& job = queue[k];
            const Scenario& sc = cfg.scenarios[job.si];
            ToleranceTable tt;
            tt.scale = tolerance_scale;
            tt.overrides = sc.tol_overrides;
            try {
                out.results[job.si].reports[job.ci] =
                    run_one_check(sc, *flows[job.si], sc.checks[job.ci], tt);
            } catch (const ExtinctionError& e) {
                job_errors[k] = sc.name + "." + sc.checks[job.ci] + ": " + e.what();
            }
        }
    };
    const int nw = std::max(1, std::min<int>(jobs, int(queue.size())));
    if (nw <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& msg : job_errors)
        if (!msg.empty()) {
            out.extinct = true;
            if (!out.extinct_message.empty()) out.extinct_message += "; ";
            out.extinct_message += msg;
        }
    for (auto& sr : out.results) {
        // drop slots whose job never produced a report (extinction mid-check)
        std::vector<CheckReport> kept;
        for (auto& rep : sr.reports)
            if (!rep.check_id.empty()) kept.push_back(std::move(rep));
        sr.reports = std::move(kept);
        for (const auto& rep : sr.reports)
            if (rep.verdict != "pass") out.all_pass = false;
    }
    return out;
}

}  // namespace holoflow
