#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "holoflow/checks.hpp"

using namespace holoflow;

namespace {

ToleranceTable default_tols;

std::vector<std::string> all_loop_labels(const ManifoldModel& M) {
    std::vector<std::string> out;
    for (const auto& l : M.loops) out.push_back(l.label);
    return out;
}

void require_all_below(const CheckReport& rep, double bound) {
    for (const auto& r : rep.residuals) {
        CAPTURE(rep.check_id, rep.model, r.name, r.value);
        REQUIRE(r.value < bound);
    }
}

const ResidualEntry& entry(const CheckReport& rep, const std::string& name) {
    for (const auto& r : rep.residuals)
        if (r.name == name) return r;
    FAIL("missing residual " + name + " in " + rep.check_id);
    static ResidualEntry dummy;
    return dummy;
}

bool has_flag(const CheckReport& rep, const std::string& f) {
    return std::find(rep.flags.begin(), rep.flags.end(), f) != rep.flags.end();
}

double param_value(const CheckReport& rep, const std::string& key) {
    for (const auto& [k, v] : rep.parameters)
        if (k == key) return std::stod(v);
    FAIL("missing parameter " + key + " in " + rep.check_id);
    return 0;
}

}  // namespace

TEST_CASE("report grid merges the anchor into uniform times") {
    auto g = report_grid(0.1, 0.4, 5);
    REQUIRE(g.size() == 5);
    REQUIRE(g[1] == Catch::Approx(0.1));
    auto g2 = report_grid(0.07, 0.4, 5);
    REQUIRE(g2.size() == 6);
    REQUIRE(std::is_sorted(g2.begin(), g2.end()));
    REQUIRE(g2.front() == 0.0);
    REQUIRE(g2.back() == 0.4);
}

TEST_CASE("flow integration places initial data at time zero and anchors at t0") {
    const auto& M = find_model("round_s2");
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    REQUIRE(fs.t0 == 0.1);
    REQUIRE(std::abs(fs.theta_at(0.0)[0] - 1.0) < 1e-11);
    REQUIRE(std::abs(fs.theta_anchor()[0] - 0.8) < 1e-11);
}

TEST_CASE("verdict logic trips on any residual above tolerance") {
    CheckReport rep;
    rep.add("a", 1e-9, 1e-8);
    rep.finalize();
    REQUIRE(rep.verdict == "pass");
    rep.add("b", 2e-8, 1e-8);
    rep.finalize();
    REQUIRE(rep.verdict == "fail");
}

TEST_CASE("tolerance table applies overrides then scale") {
    ToleranceTable tt;
    tt.scale = 10.0;
    tt.overrides["c.r"] = 1e-4;
    REQUIRE(tt("c", "r", 1e-6) == Catch::Approx(1e-3));
    REQUIRE(tt("c", "other", 1e-6) == Catch::Approx(1e-5));
}

TEST_CASE("flow consistency check on flat models is exact to 1e-8") {
    for (const char* name : {"flat_torus_2", "klein_bottle", "t4_kaehler"}) {
        const auto& M = find_model(name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_flow_consistency(M, fs, 7, default_tols);
        CAPTURE(name);
        REQUIRE(rep.verdict == "pass");
        require_all_below(rep, 1e-8);
    }
}

TEST_CASE("flow consistency matches the shrinking-sphere closed form") {
    const auto& M = find_model("round_s2");
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    CheckReport rep = check_flow_consistency(M, fs, 7, default_tols);
    REQUIRE(rep.verdict == "pass");
    REQUIRE(entry(rep, "closed_form").value < 1e-10);
    REQUIRE(entry(rep, "reversal_theta").value < 1e-8);
    REQUIRE(entry(rep, "frame_roundtrip").value < 1e-8);
}

TEST_CASE("flow consistency passes on the anisotropic group model") {
    const auto& M = find_model("su2_berger");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    CheckReport rep = check_flow_consistency(M, fs, 11, default_tols);
    CAPTURE(rep.residuals[0].value);
    REQUIRE(rep.verdict == "pass");
}

TEST_CASE("algebra rank check passes on every catalog model") {
    for (const auto& M : catalog()) {
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_algebra_rank(M, fs, default_tols);
        CAPTURE(M.name);
        std::string summary;
        for (const auto& r : rep.residuals) summary += r.name + "=" + dstr(r.value) + " ";
        CAPTURE(summary);
        REQUIRE(rep.verdict == "pass");
        REQUIRE(entry(rep, "smallloop_rank_mismatch").value == 0.0);
        REQUIRE(entry(rep, "span_rank_mismatch").value == 0.0);
        const bool curved = M.holonomy.algebra_dim() > 0;
        REQUIRE(has_flag(rep, "curvature_vanishes") == !curved);
        if (curved) {
            const double ratio = param_value(rep, "halving_ratio");
            CAPTURE(ratio);
            REQUIRE(ratio > 1.5);
            REQUIRE(ratio < 2.5);
        }
    }
}

TEST_CASE("transport rate check: trivial side on symmetric models") {
    for (const char* name : {"flat_torus_3", "round_s2", "s2xs1", "s2xt2"}) {
        const auto& M = find_model(name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_transport_rate(M, fs, default_tols);
        CAPTURE(name, param_value(rep, "residual_fine"));
        REQUIRE(rep.verdict == "pass");
        REQUIRE(has_flag(rep, "rate_term_vanishes"));
        REQUIRE(entry(rep, "rate_residual").value < 1e-6);
    }
}

TEST_CASE("transport rate check: second-order decay on the group models") {
    for (const char* name : {"su2_berger", "su2xs1"}) {
        const auto& M = find_model(name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_transport_rate(M, fs, default_tols);
        CAPTURE(name, param_value(rep, "residual_coarse"), param_value(rep, "residual_fine"),
                param_value(rep, "div_rm_norm"));
        REQUIRE(!has_flag(rep, "rate_term_vanishes"));
        const double ratio = param_value(rep, "decay_ratio");
        CAPTURE(ratio);
        REQUIRE(rep.verdict == "pass");
        REQUIRE(entry(rep, "rate_residual").value < 1e-3);
        REQUIRE(ratio > 3.0);
        REQUIRE(ratio < 5.0);
    }
}

TEST_CASE("loop rate check flags the vacuous cases and is tiny on flats") {
    {
        const auto& M = find_model("klein_bottle");
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_loop_rate_algebra(M, fs, report_grid(fs.t0, fs.T),
                                                  all_loop_labels(M), default_tols);
        REQUIRE(rep.verdict == "pass");
        REQUIRE(has_flag(rep, "loop_rate_vanishes"));
        require_all_below(rep, 1e-8);
    }
    {
        const auto& M = find_model("round_s2");
        FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
        CheckReport rep = check_loop_rate_algebra(M, fs, report_grid(fs.t0, fs.T),
                                                  all_loop_labels(M), default_tols);
        REQUIRE(rep.verdict == "pass");
        REQUIRE(has_flag(rep, "loop_rate_vanishes"));
    }
}

TEST_CASE("loop rate check on the anisotropic product model") {
    const auto& M = find_model("su2xs1");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    CheckReport rep = check_loop_rate_algebra(M, fs, report_grid(fs.t0, fs.T),
                                              all_loop_labels(M), default_tols);
    CAPTURE(param_value(rep, "max_rate_norm"));
    std::string summary;
    for (const auto& r : rep.residuals) summary += r.name + "=" + dstr(r.value) + " ";
    CAPTURE(summary);
    REQUIRE(rep.verdict == "pass");
    REQUIRE(entry(rep, "antisymmetry").value < 1e-5);
    REQUIRE(entry(rep, "span_containment").value < 1e-3);
}

TEST_CASE("holonomy invariance check passes across the catalog") {
    for (const auto& M : catalog()) {
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep = check_holonomy_invariance(M, fs, report_grid(fs.t0, fs.T),
                                                    all_loop_labels(M), default_tols);
        CAPTURE(M.name);
        std::string summary;
    for (const auto& r : rep.residuals) summary += r.name + "=" + dstr(r.value) + " ";
    CAPTURE(summary);
        REQUIRE(rep.verdict == "pass");
    }
}

TEST_CASE("holonomy invariance keeps the reflection determinant at -1") {
    const auto& M = find_model("s2xs1_reflect");
    FlowState fs = integrate_flow(M, M.theta_default, 0.1, 0.2);
    const auto grid = report_grid(fs.t0, fs.T);
    const UhlenbeckPath up = integrate_uhlenbeck(M, fs, M.loop("deck_fiber").path.basepoint);
    for (double t : grid) {
        const Mat Q = flowed_holonomy(M, fs, up, M.loop("deck_fiber").path, t);
        const auto dets = block_determinants(M.holonomy, Q);
        REQUIRE(dets.size() == 1);
        REQUIRE(std::abs(dets[0] + 1.0) < 1e-8);
    }
}

TEST_CASE("structure constancy check on product and complex structures") {
    for (const char* name : {"round_s2", "s2xs1", "t4_kaehler", "su2xs1", "s2xt2"}) {
        const auto& M = find_model(name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        CheckReport rep =
            check_structure_constancy(M, fs, report_grid(fs.t0, fs.T), default_tols);
        CAPTURE(name);
        std::string summary;
    for (const auto& r : rep.residuals) summary += r.name + "=" + dstr(r.value) + " ";
    CAPTURE(summary);
        REQUIRE(rep.verdict == "pass");
        REQUIRE(!has_flag(rep, "no_structures"));
        REQUIRE(entry(rep, "pushpull").value < 1e-7);
    }
}

TEST_CASE("structure constancy is vacuous without structures") {
    const auto& M = find_model("klein_bottle");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    CheckReport rep = check_structure_constancy(M, fs, report_grid(fs.t0, fs.T), default_tols);
    REQUIRE(rep.verdict == "pass");
    REQUIRE(has_flag(rep, "no_structures"));
    REQUIRE(rep.residuals.empty());
}
