#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "holoflow/catalog.hpp"
#include "holoflow/flow.hpp"
#include "holoflow/uhlenbeck.hpp"

using namespace holoflow;

TEST_CASE("integrated sphere coefficients match the closed form") {
    const auto& M = find_model("round_s2");
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    REQUIRE(fs.times[fs.t0_index] == 0.1);  // anchor is an exact grid point
    for (double t : {0.0, 0.07, 0.1, 0.123456, 0.25, 0.4})
        REQUIRE(fs.theta_at(t)[0] == Catch::Approx(1.0 - 2 * t).margin(1e-10));
    REQUIRE(fs.theta_anchor()[0] == Catch::Approx(0.8).margin(1e-12));
}

TEST_CASE("flat coefficients stay constant") {
    const auto& M = find_model("flat_torus_2");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    for (double t : {0.0, 0.2, 0.37, 0.5}) {
        Vec th = fs.theta_at(t);
        REQUIRE(th[0] == M.theta_default[0]);
        REQUIRE(th[1] == M.theta_default[1]);
    }
}

TEST_CASE("interpolated coefficients solve the flow equation between grid points") {
    const auto& M = find_model("su2_berger");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    const double dt = 5e-4;
    for (double t : {0.013, 0.042, 0.05, 0.071, 0.0925}) {
        Vec fwd = fs.theta_at(t + dt), bwd = fs.theta_at(t - dt);
        Vec rhs = M.flow_rhs(fs.theta_at(t));
        for (std::size_t a = 0; a < rhs.size(); ++a)
            REQUIRE((fwd[a] - bwd[a]) / (2 * dt) == Catch::Approx(rhs[a]).margin(1e-7));
    }
}

TEST_CASE("sphere flow past the extinction time reports the failure mode") {
    const auto& M = find_model("round_s2");

    StepControl no_guard;
    no_guard.curvature_margin = 0;
    try {
        integrate_flow(M, {1.0}, 0.1, 0.6, no_guard);
        FAIL("expected extinction");
    } catch (const ExtinctionError& e) {
        REQUIRE(e.reason == "inadmissible");
        REQUIRE(e.t_critical > 0.49);
        REQUIRE(e.t_critical < 0.51);
    }

    try {
        integrate_flow(M, {1.0}, 0.1, 0.6);
        FAIL("expected extinction");
    } catch (const ExtinctionError& e) {
        REQUIRE(e.reason == "curvature_bound");
        REQUIRE(e.t_critical > 0.40);
        REQUIRE(e.t_critical < 0.51);
    }
}

TEST_CASE("flow rejects malformed requests") {
    const auto& M = find_model("round_s2");
    REQUIRE_THROWS_AS(integrate_flow(M, {1.0}, 0.5, 0.4), ParameterError);
    REQUIRE_THROWS_AS(integrate_flow(M, {-1.0}, 0.1, 0.4), ParameterError);
    REQUIRE_THROWS_AS(integrate_flow(M, {1.0}, 0.1, -0.4), ParameterError);
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    REQUIRE_THROWS_AS(fs.theta_at(0.5), DomainError);
    REQUIRE_THROWS_AS(fs.theta_at(-0.1), DomainError);
}

TEST_CASE("evolving frame on the sphere is the closed-form dilation") {
    const auto& M = find_model("round_s2");
    FlowState fs = integrate_flow(M, {1.0}, 0.1, 0.4);
    UhlenbeckPath up = integrate_uhlenbeck(M, fs, M.basepoint);
    for (double t : {0.0, 0.05, 0.1, 0.2, 0.33, 0.4}) {
        const double c = std::sqrt((1.0 - 2 * 0.1) / (1.0 - 2 * t));
        Mat io = up.at(t);
        REQUIRE(io(0, 0) == Catch::Approx(c).margin(1e-9));
        REQUIRE(io(1, 1) == Catch::Approx(c).margin(1e-9));
        REQUIRE(std::fabs(io(0, 1)) < 1e-12);
        REQUIRE(std::fabs(io(1, 0)) < 1e-12);
    }
    REQUIRE((up.at(fs.t0) - Mat::identity(2)).max_abs() < 1e-12);
}

TEST_CASE("evolving frame is an isometry from the anchor metric") {
    for (const auto& name : {"round_s2", "su2_berger", "s2xs1", "s2xt2"}) {
        const auto& M = find_model(name);
        CAPTURE(M.name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        UhlenbeckPath up = integrate_uhlenbeck(M, fs, M.basepoint);
        Mat h = M.metric(M.basepoint, fs.theta_anchor());
        for (double t : {0.0, 0.3 * M.T_default, M.t0_default, 0.8 * M.T_default, M.T_default}) {
            Mat io = up.at(t);
            Mat gt = M.metric(M.basepoint, fs.theta_at(t));
            REQUIRE((io.transposed() * gt * io - h).max_abs() < 1e-9);
        }
    }
}

TEST_CASE("evolving frames commute with deck transforms") {
    const auto& M = find_model("s2xs1_reflect");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    const auto& deck = M.decks[1];  // the reflecting step
    Vec p{1.1, 0.7, 0.3};
    Vec q = deck.map(p);
    Mat d = deck.differential(p);
    UhlenbeckPath up_p = integrate_uhlenbeck(M, fs, p);
    UhlenbeckPath up_q = integrate_uhlenbeck(M, fs, q);
    for (double t : {0.0, 0.07, 0.15, 0.2}) {
        Mat lhs = up_q.at(t) * d;
        Mat rhs = d * up_p.at(t);
        REQUIRE((lhs - rhs).max_abs() < 1e-9);
    }
}

TEST_CASE("fiberwise evolution carries the anchor metric to the flowing metric") {
    for (const auto& name : {"round_s2", "su2_berger"}) {
        const auto& M = find_model(name);
        CAPTURE(M.name);
        FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
        MultiTensor h = MultiTensor::from_bilinear(M.metric(M.basepoint, fs.theta_anchor()));
        for (double t : {0.0, 0.4 * M.T_default, M.T_default}) {
            MultiTensor evolved = evolve_tensor(M, fs, M.basepoint, h, t);
            Mat expect = M.metric(M.basepoint, fs.theta_at(t));
            REQUIRE((evolved.as_bilinear() - expect).max_abs() < 1e-8);
        }
    }
}

TEST_CASE("fiberwise evolution agrees with pushing through the evolving frame") {
    const auto& M = find_model("su2_berger");
    FlowState fs = integrate_flow(M, M.theta_default, M.t0_default, M.T_default);
    UhlenbeckPath up = integrate_uhlenbeck(M, fs, M.basepoint);

    MultiTensor vecT(3, 1, 0);
    vecT.at({0}) = 0.4;
    vecT.at({1}) = -1.1;
    vecT.at({2}) = 0.7;
    MultiTensor endoT(3, 1, 1);
    endoT.at({0, 1}) = 1.0;
    endoT.at({1, 2}) = -0.5;
    endoT.at({2, 0}) = 0.25;

    for (double t : {0.0, 0.03, 0.08, 0.1}) {
        Mat io = up.at(t);

        MultiTensor v_ev = evolve_tensor(M, fs, M.basepoint, vecT, t);
        MultiTensor v_push = push_tensor(vecT, io);
        for (std::size_t f = 0; f < v_ev.size(); ++f)
            REQUIRE(v_ev.flat_at(f) == Catch::Approx(v_push.flat_at(f)).margin(1e-8));

        MultiTensor e_ev = evolve_tensor(M, fs, M.basepoint, endoT, t);
        MultiTensor e_push = push_tensor(endoT, io);
        for (std::size_t f = 0; f < e_ev.size(); ++f)
            REQUIRE(e_ev.flat_at(f) == Catch::Approx(e_push.flat_at(f)).margin(1e-8));
    }
}

TEST_CASE("evolving frames compose across anchors") {
    const auto& M = find_model("su2_berger");
    FlowState fs1 = integrate_flow(M, M.theta_default, 0.03, 0.1);
    UhlenbeckPath up1 = integrate_uhlenbeck(M, fs1, M.basepoint);
    FlowState fs2 = integrate_flow(M, M.theta_default, 0.07, 0.1);
    UhlenbeckPath up2 = integrate_uhlenbeck(M, fs2, M.basepoint);
    // the frame from anchor 0.03 to 0.1 factors through the frame at 0.07
    Mat direct = up1.at(0.1);
    Mat composed = up2.at(0.1) * up1.at(0.07);
    REQUIRE((direct - composed).max_abs() < 1e-8);
}

TEST_CASE("endomorphism slot action matches the push-forward derivative") {
    // d/dt push(A, exp(tR)) at t = 0 equals the slot action of R
    Mat R(2);
    R(0, 0) = 0.3;
    R(0, 1) = -0.7;
    R(1, 0) = 0.2;
    R(1, 1) = -0.1;
    MultiTensor A(2, 1, 2);
    for (std::size_t f = 0; f < A.size(); ++f) A.flat_at(f) = 0.1 * double(f) - 0.35;
    const double h = 1e-6;
    MultiTensor plus = push_tensor(A, mat_exp(R * h));
    MultiTensor minus = push_tensor(A, mat_exp(R * -h));
    MultiTensor act = endo_slot_action(A, R);
    for (std::size_t f = 0; f < A.size(); ++f)
        REQUIRE((plus.flat_at(f) - minus.flat_at(f)) / (2 * h) ==
                Catch::Approx(act.flat_at(f)).margin(1e-7));
}
