#pragma once

// Parallel transport around piecewise-smooth loops with deck-transform
// junctions, plus the two infinitesimal holonomy-algebra estimators
// (small-loop generators and the curvature span).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "holoflow/flow.hpp"
#include "holoflow/geometry.hpp"
#include "holoflow/model.hpp"
#include "holoflow/ode.hpp"
#include "holoflow/uhlenbeck.hpp"

namespace holoflow {

struct TransportOptions {
    int steps_per_segment = 2000;
    double junction_tol = 1e-9;
};

namespace detail {

// transport generator along a segment: dV/ds = -Gamma(x(s))[x'(s), V]
inline Mat transport_generator(const ManifoldModel& M, const Vec& theta, const Segment& seg,
                               double s) {
    const Vec x = seg.pos(s);
    const Vec v = seg.vel(s);
    auto cp = curvature_at(M, x, theta, CurvLevel::connection);
    Mat a(M.dim);
    for (int k = 0; k < M.dim; ++k)
        for (int j = 0; j < M.dim; ++j) {
            double s_ = 0;
            for (int i = 0; i < M.dim; ++i) s_ += cp.gamma[k][i][j] * v[std::size_t(i)];
            a(k, j) = -s_;
        }
    return a;
}

}  // namespace detail

// Transport along one segment over [s_from, s_to] (direction may be reversed).
inline Mat transport_segment(const ManifoldModel& M, const Vec& theta, const Segment& seg,
                             double s_from, double s_to, int nsteps) {
    auto A = [&](double s) { return detail::transport_generator(M, theta, seg, s); };
    return rk4_matrix(A, Mat::identity(M.dim), s_from, s_to, nsteps);
}

// Full loop transport at fixed coefficients, including junction factors:
// after a segment ending at y with junction deck D, the path continues at
// the representative x with D(x) = y and vectors pull back through dD(x).
inline Mat transport_loop(const ManifoldModel& M, const Vec& theta, const LoopPath& loop,
                          const TransportOptions& opt = {}) {
    if (loop.segments.empty() || loop.segments.size() != loop.junctions.size())
        throw ContractError("transport_loop: malformed loop");
    Mat P = Mat::identity(M.dim);
    for (std::size_t s = 0; s < loop.segments.size(); ++s) {
        P = transport_segment(M, theta, loop.segments[s], 0.0, 1.0, opt.steps_per_segment) * P;
        const Vec end = loop.segments[s].pos(1.0);
        const Vec next = s + 1 < loop.segments.size() ? loop.segments[s + 1].pos(0.0)
                                                      : loop.basepoint;
        const int jd = loop.junctions[s];
        if (jd < 0) {
            if (vec_norm_inf(vec_sub(end, next)) > opt.junction_tol)
                throw ContractError("transport_loop: segment chain is discontinuous");
        } else {
            const auto& deck = M.deck(jd);
            if (vec_norm_inf(vec_sub(end, deck.map(next))) > opt.junction_tol)
                throw ContractError("transport_loop: junction does not close the chain");
            P = mat_inverse(deck.differential(next)) * P;
        }
    }
    return P;
}

// Loop holonomy under the flow, pulled back to the anchor-time fiber through
// the evolving frame at the loop basepoint.
inline Mat flowed_holonomy(const ManifoldModel& M, const FlowState& fs, const UhlenbeckPath& up,
                           const LoopPath& loop, double t, const TransportOptions& opt = {}) {
    const Mat P = transport_loop(M, fs.theta_at(t), loop, opt);
    const Mat io = up.at(t);
    return mat_inverse(io) * P * io;
}

// ---- infinitesimal algebra estimators ----

struct AlgebraEstimate {
    std::vector<Mat> generators;  // raw candidates (metric-antisymmetric)
    std::vector<Mat> basis;       // orthonormal span, possibly after brackets
    int rank = 0;
    double antisym_residual = 0;  // worst metric-antisymmetry violation
    bool bracket_growth = false;  // brackets escaped the initial span
};

// Holonomy algebra candidates from transport around small coordinate squares:
//   P_eps = Id - eps^2 * area_ij * G + O(eps^3)
// where G is the curvature endomorphism of the (i, j) coordinate plane scaled
// by the plane's metric area. Generators are normalized by that area.
inline AlgebraEstimate smallloop_algebra(const ManifoldModel& M, const Vec& theta, const Vec& x,
                                         double eps = 0.02, int steps = 400,
                                         double rank_tol = 1e-5) {
    M.require_in_domain(x);
    const Metric g(M.metric(x, theta));
    AlgebraEstimate est;
    for (int i = 0; i < M.dim; ++i)
        for (int j = i + 1; j < M.dim; ++j) {
            auto leg = [&](int axis, double dir, const Vec& from) {
                Vec to = from;
                to[std::size_t(axis)] += dir * eps;
                Segment seg{[from, to](double s) {
                                Vec p(from.size());
                                for (std::size_t k = 0; k < p.size(); ++k)
                                    p[k] = from[k] + s * (to[k] - from[k]);
                                return p;
                            },
                            [from, to](double) {
                                Vec v(from.size());
                                for (std::size_t k = 0; k < v.size(); ++k) v[k] = to[k] - from[k];
                                return v;
                            }};
                return std::pair<Mat, Vec>(transport_segment(M, theta, seg, 0, 1, steps), to);
            };
            Vec p0 = x;
            auto [m1, p1] = leg(i, +1, p0);
            auto [m2, p2] = leg(j, +1, p1);
            auto [m3, p3] = leg(i, -1, p2);
            auto [m4, p4] = leg(j, -1, p3);
            Mat P = m4 * m3 * m2 * m1;
            const double minor = g.gram()(i, i) * g.gram()(j, j) - g.gram()(i, j) * g.gram()(i, j);
            const double area = std::sqrt(std::max(minor, 0.0));
            if (area <= 0) throw ContractError("smallloop_algebra: degenerate coordinate plane");
            Mat G = mat_log_near_identity(P) * (-1.0 / (eps * eps * area));
            est.antisym_residual = std::max(est.antisym_residual, antisymmetry_residual(G, g));
            est.generators.push_back(G);
        }
    est.basis = orthonormal_span(est.generators, rank_tol);
    est.rank = int(est.basis.size());
    return est;
}

// Holonomy algebra candidates from the curvature endomorphisms of frame
// planes, closed under one round of brackets.
inline AlgebraEstimate curvature_span_algebra(const ManifoldModel& M, const Vec& theta,
                                              const Vec& x, double rank_tol = 1e-7) {
    M.require_in_domain(x);
    auto cp = curvature_at(M, x, theta, CurvLevel::curvature);
    const Metric g(cp.g);
    AlgebraEstimate est;
    for (int a = 0; a < M.dim; ++a)
        for (int b = a + 1; b < M.dim; ++b) {
            Vec ea(std::size_t(M.dim), 0.0), eb(std::size_t(M.dim), 0.0);
            for (int i = 0; i < M.dim; ++i) {
                ea[std::size_t(i)] = cp.frame(i, a);
                eb[std::size_t(i)] = cp.frame(i, b);
            }
            Mat R = cp.curvature_endo(ea, eb);
            est.antisym_residual = std::max(est.antisym_residual, antisymmetry_residual(R, g));
            est.generators.push_back(R);
        }
    std::vector<Mat> pool = est.generators;
    std::vector<Mat> base0 = orthonormal_span(pool, rank_tol);
    for (std::size_t i = 0; i < est.generators.size(); ++i)
        for (std::size_t j = i + 1; j < est.generators.size(); ++j) {
            Mat br = commutator(est.generators[i], est.generators[j]);
            if (br.frobenius() < 1e-12) continue;
            SpanProjection pr = project_onto_span(br, base0, rank_tol);
            if (pr.residual > 1e-6) est.bracket_growth = true;
            pool.push_back(br);
        }
    est.basis = orthonormal_span(pool, rank_tol);
    est.rank = int(est.basis.size());
    return est;
}

}  // namespace holoflow
