#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "holoflow/catalog.hpp"
#include "holoflow/transport.hpp"

using namespace holoflow;

TEST_CASE("latitude transport on the round sphere is a half turn") {
    const auto& M = find_model("round_s2");
    for (double th0 : {1.0, 2.3}) {
        Mat P = transport_loop(M, {th0}, M.loop("latitude_pi3").path);
        REQUIRE((P + Mat::identity(2)).max_abs() < 1e-6);
    }
}

TEST_CASE("flat deck loops have hand-computed holonomy") {
    {
        const auto& M = find_model("klein_bottle");
        Mat P = transport_loop(M, M.theta_default, M.loop("deck_x").path);
        REQUIRE(P(0, 0) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(P(1, 1) == Catch::Approx(-1.0).margin(1e-12));
        REQUIRE(std::fabs(P(0, 1)) < 1e-12);
        REQUIRE(std::fabs(P(1, 0)) < 1e-12);
        Mat Q = transport_loop(M, M.theta_default, M.loop("deck_y").path);
        REQUIRE((Q - Mat::identity(2)).max_abs() < 1e-12);
    }
    for (const auto& name : {"flat_torus_2", "flat_torus_3", "t4_kaehler"}) {
        const auto& M = find_model(name);
        for (const auto& loop : M.loops) {
            Mat P = transport_loop(M, M.theta_default, loop.path);
            REQUIRE((P - Mat::identity(M.dim)).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("product transport acts block by block") {
    const auto& M = find_model("s2xs1");
    Mat fiber = transport_loop(M, M.theta_default, M.loop("fiber").path);
    REQUIRE((fiber - Mat::identity(3)).max_abs() < 1e-9);

    Mat expect = Mat::identity(3);
    expect(0, 0) = -1;
    expect(1, 1) = -1;
    Mat lat = transport_loop(M, M.theta_default, M.loop("latitude_pi3").path);
    REQUIRE((lat - expect).max_abs() < 1e-6);
    Mat mixed = transport_loop(M, M.theta_default, M.loop("mixed").path);
    REQUIRE((mixed - expect).max_abs() < 1e-6);
}

TEST_CASE("reflecting deck contributes an orientation-reversing factor") {
    const auto& M = find_model("s2xs1_reflect");
    Mat expect = Mat::identity(3);
    expect(1, 1) = -1;
    Mat P = transport_loop(M, M.theta_default, M.loop("deck_fiber").path);
    REQUIRE((P - expect).max_abs() < 1e-9);
}

TEST_CASE("loop transport preserves the basepoint metric") {
    for (const auto& M : catalog()) {
        CAPTURE(M.name);
        for (const auto& loop : M.loops) {
            CAPTURE(loop.label);
            Mat P = transport_loop(M, M.theta_default, loop.path);
            Mat g = M.metric(loop.path.basepoint, M.theta_default);
            REQUIRE((P.transposed() * g * P - g).max_abs() < 1e-8);
        }
    }
}

TEST_CASE("reversed loops invert the transport") {
    const auto& M = find_model("round_s2");
    const LoopPath& loop = M.loop("circle").path;
    LoopPath rev;
    rev.basepoint = loop.basepoint;
    const Segment& seg = loop.segments[0];
    rev.segments.push_back({[&seg](double s) { return seg.pos(1.0 - s); },
                            [&seg](double s) { return vec_scale(-1.0, seg.vel(1.0 - s)); }});
    rev.junctions = {-1};
    Mat P = transport_loop(M, {1.0}, loop);
    Mat Q = transport_loop(M, {1.0}, rev);
    REQUIRE((Q * P - Mat::identity(2)).max_abs() < 1e-9);
}

TEST_CASE("transport is invariant under segment splitting and junction chaining") {
    const auto& M = find_model("s2xs1");
    // same homotopy class written with a composed wrap versus two junctions
    // separated by a stationary segment
    Mat direct = transport_loop(M, M.theta_default, M.loop("mixed").path);

    LoopPath chained;
    chained.basepoint = M.basepoint;
    chained.segments.push_back({[](double s) {
                                    return Vec{M_PI / 3, 2 * M_PI * s, s};
                                },
                                [](double) {
                                    return Vec{0.0, 2 * M_PI, 1.0};
                                }});
    chained.segments.push_back({[](double) {
                                    return Vec{M_PI / 3, 2 * M_PI, 0.0};
                                },
                                [](double) {
                                    return Vec{0.0, 0.0, 0.0};
                                }});
    chained.junctions = {1, 0};  // wrap the fiber, then wrap the angle
    Mat two_step = transport_loop(M, M.theta_default, chained);
    REQUIRE((two_step - direct).max_abs() < 1e-10);

    // splitting the latitude into halves must not change the transport
    const auto& M2 = find_model("round_s2");
    Mat one = transport_loop(M2, {1.3}, M2.loop("latitude_pi3").path);
    LoopPath split;
    split.basepoint = M2.basepoint;
    split.segments.push_back({[](double s) {
                                  return Vec{M_PI / 3, M_PI * s};
                              },
                              [](double) {
                                  return Vec{0.0, M_PI};
                              }});
    split.segments.push_back({[](double s) {
                                  return Vec{M_PI / 3, M_PI * (1 + s)};
                              },
                              [](double) {
                                  return Vec{0.0, M_PI};
                              }});
    split.junctions = {-1, 0};
    Mat halves = transport_loop(M2, {1.3}, split);
    REQUIRE((halves - one).max_abs() < 1e-10);
}

TEST_CASE("transport rejects discontinuous chains") {
    const auto& M = find_model("round_s2");
    LoopPath broken;
    broken.basepoint = M.basepoint;
    broken.segments.push_back(models::line_segment(M.basepoint, {M_PI / 3 + 0.3, 0.2}));
    broken.junctions = {-1};
    REQUIRE_THROWS_AS(transport_loop(M, {1.0}, broken), ContractError);
}

TEST_CASE("small square loops recover the curvature endomorphism") {
    const auto& M = find_model("round_s2");
    Vec x{M_PI / 2 + 0.1, 0.2};
    Vec th{1.0};
    auto est = smallloop_algebra(M, th, x);
    REQUIRE(est.generators.size() == 1);
    auto cp = curvature_at(M, x, th, CurvLevel::curvature);
    Metric g(cp.g);
    const double area =
        std::sqrt(cp.g(0, 0) * cp.g(1, 1) - cp.g(0, 1) * cp.g(0, 1));
    Mat expected = cp.curvature_endo({1, 0}, {0, 1}) * (1.0 / area);
    REQUIRE((est.generators[0] - expected).max_abs() < 5e-3);
    REQUIRE(est.antisym_residual < 1e-6);
    REQUIRE(est.rank == 1);
}

TEST_CASE("small-loop and curvature-span algebras agree on rank and span") {
    struct Expect {
        const char* name;
        int rank;
    };
    for (auto [name, rank] : {Expect{"flat_torus_2", 0}, Expect{"round_s2", 1},
                              Expect{"su2_berger", 3}, Expect{"s2xt2", 1}}) {
        const auto& M = find_model(name);
        CAPTURE(M.name);
        Vec x = M.probe.pos(0.45);
        auto span = curvature_span_algebra(M, M.theta_default, x);
        auto small = smallloop_algebra(M, M.theta_default, x);
        REQUIRE(span.rank == rank);
        REQUIRE(small.rank == rank);
        REQUIRE(span.antisym_residual < 1e-9);
        for (const auto& gmat : small.generators) {
            if (gmat.frobenius() < 1e-9) continue;
            SpanProjection pr = project_onto_span(gmat, span.basis);
            REQUIRE(pr.residual < 1e-3);
        }
    }
}

TEST_CASE("bracket closure does not grow the curvature span on the catalog") {
    for (const auto& name : {"round_s2", "su2_berger", "s2xs1", "s2xt2"}) {
        const auto& M = find_model(name);
        CAPTURE(M.name);
        auto est = curvature_span_algebra(M, M.theta_default, M.probe.pos(0.3));
        REQUIRE(!est.bracket_growth);
    }
}

TEST_CASE("holonomy pulled back through the evolving frame is flow invariant") {
    const auto& M = find_model("round_s2");
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    UhlenbeckPath up = integrate_uhlenbeck(M, fs, M.basepoint);
    for (double t : {0.0, 0.1, 0.25, 0.4}) {
        Mat H = flowed_holonomy(M, fs, up, M.loop("latitude_pi3").path, t);
        REQUIRE((H + Mat::identity(2)).max_abs() < 1e-6);
    }
}
