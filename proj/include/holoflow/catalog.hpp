#pragma once

// Built-in model catalog: flat quotients, round spheres and their products,
// a mapping torus with an orientation-reversing deck, and left-invariant
// squashed three-sphere metrics. Every model carries the same contract:
// a chart metric g(x, theta), the coefficient flow theta' = flow_rhs(theta)
// reproducing dg/dt = -2 Ric, deck transforms, canonical loops, parallel
// structures and the expected holonomy descriptor.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "holoflow/geometry.hpp"
#include "holoflow/jets.hpp"
#include "holoflow/model.hpp"

namespace holoflow {
namespace models {

// ---- metric functors (templated over double / jet scalars) ----

// g_ii = theta[idx[i]]^2, constant in x.
struct DiagSquareMetric {
    int dim;
    int idx[4];
    template <class T>
    void operator()(const T x[], const Vec& th, T out[4][4]) const {
        for (int i = 0; i < dim; ++i) {
            const double c = th[std::size_t(idx[i])];
            out[i][i] = scalar_like(x[0], c * c);
        }
    }
};

// Sphere block th0*(d0^2 + sin^2(x0) d1^2), extra circle coords squared.
struct SphereBlockMetric {
    int dim;
    int extra_idx[2];
    template <class T>
    void operator()(const T x[], const Vec& th, T out[4][4]) const {
        using std::sin;
        out[0][0] = scalar_like(x[0], th[0]);
        T s = sin(x[0]);
        out[1][1] = th[0] * (s * s);
        for (int i = 2; i < dim; ++i) {
            const double c = th[std::size_t(extra_idx[i - 2])];
            out[i][i] = scalar_like(x[0], c * c);
        }
    }
};

// Left-invariant metric on the unit quaternion group in the chart
// u -> (w, u), w = sqrt(1-|u|^2). The moving frame is F(u) = w I + S(u)
// (columns are the left-invariant fields, S(u)v = u x v, det F = w) and the
// metric assigns the coefficient th[k] to the k-th frame direction:
//   g = F^{-T} diag(th) F^{-1}.
// With `extra`, a flat circle coordinate of scale th[3] is appended.
struct SquashedSphereMetric {
    bool extra = false;
    template <class T>
    void operator()(const T x[], const Vec& th, T out[4][4]) const {
        using std::sqrt;
        T one = scalar_like(x[0], 1.0);
        T w = sqrt(one - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]);
        T F[3][3] = {{w, -x[2], x[1]}, {x[2], w, -x[0]}, {-x[1], x[0], w}};
        T inv_w = reciprocal(w);
        T adj[3][3];
        adj[0][0] = F[1][1] * F[2][2] - F[1][2] * F[2][1];
        adj[0][1] = F[0][2] * F[2][1] - F[0][1] * F[2][2];
        adj[0][2] = F[0][1] * F[1][2] - F[0][2] * F[1][1];
        adj[1][0] = F[1][2] * F[2][0] - F[1][0] * F[2][2];
        adj[1][1] = F[0][0] * F[2][2] - F[0][2] * F[2][0];
        adj[1][2] = F[0][2] * F[1][0] - F[0][0] * F[1][2];
        adj[2][0] = F[1][0] * F[2][1] - F[1][1] * F[2][0];
        adj[2][1] = F[0][1] * F[2][0] - F[0][0] * F[2][1];
        adj[2][2] = F[0][0] * F[1][1] - F[0][1] * F[1][0];
        T Finv[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Finv[i][j] = adj[i][j] * inv_w;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                T s = Finv[0][i] * Finv[0][j] * th[0];
                s += Finv[1][i] * Finv[1][j] * th[1];
                s += Finv[2][i] * Finv[2][j] * th[2];
                out[i][j] = s;
            }
        if (extra) out[3][3] = scalar_like(x[0], th[3] * th[3]);
    }
};

// ---- shared pieces ----

inline DeckTransform translation_deck(int dim, int axis, double amount, std::string label) {
    return {std::move(label),
            [axis, amount](const Vec& x) {
                Vec y = x;
                y[std::size_t(axis)] += amount;
                return y;
            },
            [dim](const Vec&) { return Mat::identity(dim); }};
}

inline Segment line_segment(const Vec& from, const Vec& to) {
    const Vec d = vec_sub(to, from);
    return {[from, d](double s) {
                Vec p = from;
                vec_axpy(p, s, d);
                return p;
            },
            [d](double) { return d; }};
}

inline LoopPath one_segment_loop(const Vec& basepoint, Segment seg, int junction) {
    LoopPath lp;
    lp.basepoint = basepoint;
    lp.segments.push_back(std::move(seg));
    lp.junctions.push_back(junction);
    return lp;
}

inline std::function<bool(const Vec&)> all_positive(std::size_t m) {
    return [m](const Vec& th) {
        if (th.size() != m) return false;
        for (double v : th)
            if (!(v > 0)) return false;
        return true;
    };
}

inline Vec squashed_rhs(const Vec& th) {
    auto term = [&](int i, int j, int k) {
        const double a = th[std::size_t(i)], b = th[std::size_t(j)], c = th[std::size_t(k)];
        return -4.0 * (a * a - (b - c) * (b - c)) / (b * c);
    };
    return {term(0, 1, 2), term(1, 2, 0), term(2, 0, 1)};
}

inline Mat sphere_complex_structure(double sin_theta, int dim) {
    Mat J(dim);
    J(0, 1) = -sin_theta;
    J(1, 0) = 1.0 / sin_theta;
    for (int i = 2; i + 1 < dim; i += 2) {
        J(i, i + 1) = -1.0;
        J(i + 1, i) = 1.0;
    }
    return J;
}

inline Mat block_projection(int dim, int lo, int hi) {
    Mat p(dim);
    for (int i = lo; i < hi; ++i) p(i, i) = 1.0;
    return p;
}

// ---- the individual models ----

inline ManifoldModel flat_torus(int dim) {
    ManifoldModel M;
    M.name = dim == 2 ? "flat_torus_2" : "flat_torus_3";
    M.dim = dim;
    M.box_lo = Vec(std::size_t(dim), -2.0);
    M.box_hi = Vec(std::size_t(dim), 2.0);
    DiagSquareMetric f{dim, {0, 1, 2, 3}};
    M.metric = make_metric_fn(f, dim);
    M.metric_derivs = make_jet_supplier(f, dim);
    M.flow_rhs = [dim](const Vec&) { return Vec(std::size_t(dim), 0.0); };
    M.admissible = all_positive(std::size_t(dim));
    M.closed_form_flow = [](double, const Vec& th0) { return th0; };
    for (int a = 0; a < dim; ++a)
        M.decks.push_back(translation_deck(dim, a, 1.0, std::string("translate_") + char('x' + a)));
    M.holonomy.family = HolFamily::trivial;
    M.holonomy.tolerance = 1e-6;
    M.basepoint = Vec(std::size_t(dim), 0.0);
    for (int a = 0; a < dim; ++a) {
        Vec end = M.basepoint;
        end[std::size_t(a)] = 1.0;
        M.loops.push_back({std::string("deck_") + char('x' + a),
                           one_segment_loop(M.basepoint, line_segment(M.basepoint, end), a)});
    }
    M.theta_default = dim == 2 ? Vec{1.0, 1.4} : Vec{1.0, 1.4, 0.8};
    M.T_default = 0.5;
    M.t0_default = 0.2;
    Vec probe_end = dim == 2 ? Vec{0.7, 0.4} : Vec{0.6, 0.4, 0.3};
    M.probe = line_segment(M.basepoint, probe_end);
    M.theta_sample_lo = Vec(std::size_t(dim), 0.6);
    M.theta_sample_hi = Vec(std::size_t(dim), 1.8);
    return M;
}

inline ManifoldModel klein_bottle() {
    ManifoldModel M = flat_torus(2);
    M.name = "klein_bottle";
    M.decks.clear();
    M.decks.push_back({"glide_x",
                       [](const Vec& x) {
                           return Vec{x[0] + 1.0, -x[1]};
                       },
                       [](const Vec&) {
                           Mat d(2);
                           d(0, 0) = 1.0;
                           d(1, 1) = -1.0;
                           return d;
                       }});
    M.decks.push_back(translation_deck(2, 1, 1.0, "translate_y"));
    M.holonomy.family = HolFamily::z2_reflection;
    M.holonomy.flip_indices = {1};
    M.loops.clear();
    M.loops.push_back(
        {"deck_x", one_segment_loop(M.basepoint, line_segment(M.basepoint, Vec{1.0, 0.0}), 0)});
    M.loops.push_back(
        {"deck_y", one_segment_loop(M.basepoint, line_segment(M.basepoint, Vec{0.0, 1.0}), 1)});
    return M;
}

inline Segment chart_circle(const Vec& center, int ax0, int ax1, double radius, int dim) {
    // starts at center + radius*e_ax0 and returns there
    return {[=](double s) {
                Vec p = center;
                p[std::size_t(ax0)] += radius * std::cos(2 * M_PI * s);
                p[std::size_t(ax1)] += radius * std::sin(2 * M_PI * s);
                return p;
            },
            [=](double s) {
                Vec v(std::size_t(dim), 0.0);
                v[std::size_t(ax0)] = -2 * M_PI * radius * std::sin(2 * M_PI * s);
                v[std::size_t(ax1)] = 2 * M_PI * radius * std::cos(2 * M_PI * s);
                return v;
            }};
}

inline ManifoldModel round_sphere() {
    ManifoldModel M;
    M.name = "round_s2";
    M.dim = 2;
    M.box_lo = {1e-3, -4 * M_PI};
    M.box_hi = {M_PI - 1e-3, 4 * M_PI};
    SphereBlockMetric f{2, {0, 0}};
    M.metric = make_metric_fn(f, 2);
    M.metric_derivs = make_jet_supplier(f, 2);
    M.flow_rhs = [](const Vec&) { return Vec{-2.0}; };
    M.admissible = all_positive(1);
    M.closed_form_flow = [](double t, const Vec& th0) { return Vec{th0[0] - 2.0 * t}; };
    M.decks.push_back(translation_deck(2, 1, 2 * M_PI, "wrap_phi"));
    M.structures.push_back({StructureTag::complex_structure, "rotation_by_quarter",
                            [](const Vec& x, const Vec&) {
                                return sphere_complex_structure(std::sin(x[0]), 2);
                            }});
    M.holonomy.family = HolFamily::u1_kaehler;
    M.holonomy.tolerance = 1e-6;
    M.basepoint = {M_PI / 3, 0.0};
    M.loops.push_back({"latitude_pi3",
                       one_segment_loop(M.basepoint,
                                        {[](double s) {
                                             return Vec{M_PI / 3, 2 * M_PI * s};
                                         },
                                         [](double) {
                                             return Vec{0.0, 2 * M_PI};
                                         }},
                                        0)});
    {
        LoopPath circ = one_segment_loop(Vec{M_PI / 2 + 0.4, 0.0},
                                         chart_circle({M_PI / 2, 0.0}, 0, 1, 0.4, 2), -1);
        M.loops.push_back({"circle", circ});
    }
    {
        LoopPath tri;
        tri.basepoint = {M_PI / 2, 0.0};
        Vec a = tri.basepoint, b{M_PI / 2, 0.8}, c{M_PI / 3, 0.4};
        tri.segments = {line_segment(a, b), line_segment(b, c), line_segment(c, a)};
        tri.junctions = {-1, -1, -1};
        M.loops.push_back({"triangle", tri});
    }
    M.theta_default = {1.0};
    M.T_default = 0.4;
    M.t0_default = 0.1;
    M.probe = line_segment(M.basepoint, {M_PI / 3 + 0.5, 0.3});
    M.theta_sample_lo = {0.5};
    M.theta_sample_hi = {2.0};
    return M;
}

inline ManifoldModel sphere_circle_product() {
    ManifoldModel M;
    M.name = "s2xs1";
    M.dim = 3;
    M.box_lo = {1e-3, -4 * M_PI, -3.0};
    M.box_hi = {M_PI - 1e-3, 4 * M_PI, 3.0};
    SphereBlockMetric f{3, {1, 1}};
    M.metric = make_metric_fn(f, 3);
    M.metric_derivs = make_jet_supplier(f, 3);
    M.flow_rhs = [](const Vec&) { return Vec{-2.0, 0.0}; };
    M.admissible = all_positive(2);
    M.closed_form_flow = [](double t, const Vec& th0) { return Vec{th0[0] - 2.0 * t, th0[1]}; };
    M.decks.push_back(translation_deck(3, 1, 2 * M_PI, "wrap_phi"));
    M.decks.push_back(translation_deck(3, 2, 1.0, "wrap_fiber"));
    M.decks.push_back({"wrap_both",
                       [](const Vec& x) {
                           return Vec{x[0], x[1] + 2 * M_PI, x[2] + 1.0};
                       },
                       [](const Vec&) { return Mat::identity(3); }});
    M.structures.push_back({StructureTag::projection, "sphere_block",
                            [](const Vec&, const Vec&) { return block_projection(3, 0, 2); }});
    M.structures.push_back({StructureTag::projection, "fiber_block",
                            [](const Vec&, const Vec&) { return block_projection(3, 2, 3); }});
    M.holonomy.family = HolFamily::product_block;
    M.holonomy.blocks = {{DescriptorBlock::rotation, {0, 1}}, {DescriptorBlock::fixed, {2}}};
    M.holonomy.tolerance = 1e-6;
    M.basepoint = {M_PI / 3, 0.0, 0.0};
    M.loops.push_back({"fiber", one_segment_loop(M.basepoint,
                                                 line_segment(M.basepoint, {M_PI / 3, 0.0, 1.0}),
                                                 1)});
    M.loops.push_back({"latitude_pi3",
                       one_segment_loop(M.basepoint,
                                        {[](double s) {
                                             return Vec{M_PI / 3, 2 * M_PI * s, 0.0};
                                         },
                                         [](double) {
                                             return Vec{0.0, 2 * M_PI, 0.0};
                                         }},
                                        0)});
    M.loops.push_back({"mixed",
                       one_segment_loop(M.basepoint,
                                        {[](double s) {
                                             return Vec{M_PI / 3, 2 * M_PI * s, s};
                                         },
                                         [](double) {
                                             return Vec{0.0, 2 * M_PI, 1.0};
                                         }},
                                        2)});
    M.theta_default = {1.0, 1.0};
    M.T_default = 0.2;
    M.t0_default = 0.1;
    M.probe = line_segment(M.basepoint, {M_PI / 3 + 0.5, 0.3, 0.4});
    M.theta_sample_lo = {0.5, 0.6};
    M.theta_sample_hi = {2.0, 1.8};
    return M;
}

inline ManifoldModel reflected_mapping_torus() {
    ManifoldModel M = sphere_circle_product();
    M.name = "s2xs1_reflect";
    M.decks.clear();
    M.decks.push_back(translation_deck(3, 1, 2 * M_PI, "wrap_phi"));
    M.decks.push_back({"reflect_step",
                       [](const Vec& x) {
                           return Vec{x[0], -x[1], x[2] + 1.0};
                       },
                       [](const Vec&) {
                           Mat d(3);
                           d(0, 0) = 1.0;
                           d(1, 1) = -1.0;
                           d(2, 2) = 1.0;
                           return d;
                       }});
    M.decks.push_back(translation_deck(3, 2, 2.0, "double_step"));
    M.holonomy.family = HolFamily::o2_block;
    M.holonomy.blocks = {{DescriptorBlock::orthogonal, {0, 1}}, {DescriptorBlock::fixed, {2}}};
    M.loops.clear();
    M.loops.push_back({"deck_fiber",
                       one_segment_loop(M.basepoint,
                                        line_segment(M.basepoint, {M_PI / 3, 0.0, 1.0}), 1)});
    M.loops.push_back({"latitude_pi3",
                       one_segment_loop(M.basepoint,
                                        {[](double s) {
                                             return Vec{M_PI / 3, 2 * M_PI * s, 0.0};
                                         },
                                         [](double) {
                                             return Vec{0.0, 2 * M_PI, 0.0};
                                         }},
                                        0)});
    return M;
}

inline ManifoldModel squashed_sphere() {
    ManifoldModel M;
    M.name = "su2_berger";
    M.dim = 3;
    M.box_lo = Vec(3, -0.45);
    M.box_hi = Vec(3, 0.45);
    SquashedSphereMetric f{false};
    M.metric = make_metric_fn(f, 3);
    M.metric_derivs = make_jet_supplier(f, 3);
    M.flow_rhs = squashed_rhs;
    M.admissible = all_positive(3);
    M.holonomy.family = HolFamily::so3;
    M.holonomy.tolerance = 1e-6;
    M.basepoint = Vec(3, 0.0);
    auto petal = [](int ax0, int ax1) {
        const double r = 0.35 / 2;
        return Segment{[=](double s) {
                           Vec p(3, 0.0);
                           p[std::size_t(ax0)] = r * (1 - std::cos(2 * M_PI * s));
                           p[std::size_t(ax1)] = r * std::sin(2 * M_PI * s);
                           return p;
                       },
                       [=](double s) {
                           Vec v(3, 0.0);
                           v[std::size_t(ax0)] = 2 * M_PI * r * std::sin(2 * M_PI * s);
                           v[std::size_t(ax1)] = 2 * M_PI * r * std::cos(2 * M_PI * s);
                           return v;
                       }};
    };
    M.loops.push_back({"circle_xy", one_segment_loop(M.basepoint, petal(0, 1), -1)});
    M.loops.push_back({"circle_yz", one_segment_loop(M.basepoint, petal(1, 2), -1)});
    M.theta_default = {1.1, 1.0, 0.95};
    M.T_default = 0.1;
    M.t0_default = 0.05;
    M.probe = line_segment(M.basepoint, {0.3, 0.2, 0.1});
    M.theta_sample_lo = Vec(3, 0.8);
    M.theta_sample_hi = Vec(3, 1.3);
    return M;
}

inline ManifoldModel squashed_sphere_circle() {
    ManifoldModel M;
    M.name = "su2xs1";
    M.dim = 4;
    M.box_lo = {-0.45, -0.45, -0.45, -3.0};
    M.box_hi = {0.45, 0.45, 0.45, 3.0};
    SquashedSphereMetric f{true};
    M.metric = make_metric_fn(f, 4);
    M.metric_derivs = make_jet_supplier(f, 4);
    M.flow_rhs = [](const Vec& th) {
        Vec r = squashed_rhs(th);
        r.push_back(0.0);
        return r;
    };
    M.admissible = all_positive(4);
    M.decks.push_back(translation_deck(4, 3, 1.0, "wrap_fiber"));
    M.structures.push_back({StructureTag::projection, "group_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 0, 3); }});
    M.structures.push_back({StructureTag::projection, "fiber_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 3, 4); }});
    M.holonomy.family = HolFamily::product_block;
    M.holonomy.blocks = {{DescriptorBlock::rotation, {0, 1, 2}}, {DescriptorBlock::fixed, {3}}};
    M.holonomy.tolerance = 1e-6;
    M.basepoint = Vec(4, 0.0);
    {
        const double r = 0.35 / 2;
        Segment seg{[=](double s) {
                        return Vec{r * (1 - std::cos(2 * M_PI * s)), r * std::sin(2 * M_PI * s),
                                   0.0, 0.0};
                    },
                    [=](double s) {
                        return Vec{2 * M_PI * r * std::sin(2 * M_PI * s),
                                   2 * M_PI * r * std::cos(2 * M_PI * s), 0.0, 0.0};
                    }};
        M.loops.push_back({"circle_xy", one_segment_loop(M.basepoint, seg, -1)});
    }
    M.loops.push_back({"fiber", one_segment_loop(M.basepoint,
                                                 line_segment(M.basepoint, {0, 0, 0, 1.0}), 0)});
    M.theta_default = {1.1, 1.0, 0.95, 1.0};
    M.T_default = 0.1;
    M.t0_default = 0.05;
    M.probe = line_segment(M.basepoint, {0.3, 0.2, 0.1, 0.4});
    M.theta_sample_lo = {0.8, 0.8, 0.8, 0.7};
    M.theta_sample_hi = {1.3, 1.3, 1.3, 1.6};
    return M;
}

inline ManifoldModel flat_kaehler_torus() {
    ManifoldModel M;
    M.name = "t4_kaehler";
    M.dim = 4;
    M.box_lo = Vec(4, -2.0);
    M.box_hi = Vec(4, 2.0);
    DiagSquareMetric f{4, {0, 0, 1, 1}};
    M.metric = make_metric_fn(f, 4);
    M.metric_derivs = make_jet_supplier(f, 4);
    M.flow_rhs = [](const Vec&) { return Vec{0.0, 0.0}; };
    M.admissible = all_positive(2);
    M.closed_form_flow = [](double, const Vec& th0) { return th0; };
    static const char* translate_names[4] = {"translate_x", "translate_y", "translate_z",
                                             "translate_w"};
    for (int a = 0; a < 4; ++a)
        M.decks.push_back(translation_deck(4, a, 1.0, translate_names[a]));
    M.structures.push_back({StructureTag::complex_structure, "rotation_by_quarter",
                            [](const Vec&, const Vec&) {
                                Mat J(4);
                                J(0, 1) = -1.0;
                                J(1, 0) = 1.0;
                                J(2, 3) = -1.0;
                                J(3, 2) = 1.0;
                                return J;
                            }});
    M.structures.push_back({StructureTag::projection, "first_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 0, 2); }});
    M.structures.push_back({StructureTag::projection, "second_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 2, 4); }});
    M.holonomy.family = HolFamily::trivial;
    M.holonomy.tolerance = 1e-6;
    M.basepoint = Vec(4, 0.0);
    static const char* axis_names[4] = {"deck_x", "deck_y", "deck_z", "deck_w"};
    for (int a = 0; a < 4; ++a) {
        Vec end = M.basepoint;
        end[std::size_t(a)] = 1.0;
        M.loops.push_back(
            {axis_names[a], one_segment_loop(M.basepoint, line_segment(M.basepoint, end), a)});
    }
    M.theta_default = {1.0, 1.3};
    M.T_default = 0.5;
    M.t0_default = 0.2;
    M.probe = line_segment(M.basepoint, {0.5, 0.3, 0.2, 0.4});
    M.theta_sample_lo = {0.6, 0.6};
    M.theta_sample_hi = {1.8, 1.8};
    return M;
}

inline ManifoldModel sphere_torus_product() {
    ManifoldModel M;
    M.name = "s2xt2";
    M.dim = 4;
    M.box_lo = {1e-3, -4 * M_PI, -2.0, -2.0};
    M.box_hi = {M_PI - 1e-3, 4 * M_PI, 2.0, 2.0};
    SphereBlockMetric f{4, {1, 1}};
    M.metric = make_metric_fn(f, 4);
    M.metric_derivs = make_jet_supplier(f, 4);
    M.flow_rhs = [](const Vec&) { return Vec{-2.0, 0.0}; };
    M.admissible = all_positive(2);
    M.closed_form_flow = [](double t, const Vec& th0) { return Vec{th0[0] - 2.0 * t, th0[1]}; };
    M.decks.push_back(translation_deck(4, 1, 2 * M_PI, "wrap_phi"));
    M.decks.push_back(translation_deck(4, 2, 1.0, "translate_p"));
    M.decks.push_back(translation_deck(4, 3, 1.0, "translate_q"));
    M.structures.push_back({StructureTag::complex_structure, "rotation_by_quarter",
                            [](const Vec& x, const Vec&) {
                                return sphere_complex_structure(std::sin(x[0]), 4);
                            }});
    M.structures.push_back({StructureTag::projection, "sphere_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 0, 2); }});
    M.structures.push_back({StructureTag::projection, "torus_block",
                            [](const Vec&, const Vec&) { return block_projection(4, 2, 4); }});
    M.holonomy.family = HolFamily::so2_block;
    M.holonomy.blocks = {{DescriptorBlock::rotation, {0, 1}}, {DescriptorBlock::fixed, {2, 3}}};
    M.holonomy.tolerance = 1e-6;
    M.basepoint = {M_PI / 3, 0.0, 0.0, 0.0};
    M.loops.push_back({"latitude_pi3",
                       one_segment_loop(M.basepoint,
                                        {[](double s) {
                                             return Vec{M_PI / 3, 2 * M_PI * s, 0.0, 0.0};
                                         },
                                         [](double) {
                                             return Vec{0.0, 2 * M_PI, 0.0, 0.0};
                                         }},
                                        0)});
    M.loops.push_back({"deck_p", one_segment_loop(M.basepoint,
                                                  line_segment(M.basepoint,
                                                               {M_PI / 3, 0.0, 1.0, 0.0}),
                                                  1)});
    M.theta_default = {1.0, 1.0};
    M.T_default = 0.2;
    M.t0_default = 0.1;
    M.probe = line_segment(M.basepoint, {M_PI / 3 + 0.5, 0.3, 0.4, 0.2});
    M.theta_sample_lo = {0.5, 0.6};
    M.theta_sample_hi = {2.0, 1.8};
    return M;
}

}  // namespace models

inline const std::vector<ManifoldModel>& catalog() {
    static const std::vector<ManifoldModel> all = [] {
        std::vector<ManifoldModel> v;
        v.push_back(models::flat_torus(2));
        v.push_back(models::flat_torus(3));
        v.push_back(models::klein_bottle());
        v.push_back(models::round_sphere());
        v.push_back(models::sphere_circle_product());
        v.push_back(models::reflected_mapping_torus());
        v.push_back(models::squashed_sphere());
        v.push_back(models::squashed_sphere_circle());
        v.push_back(models::flat_kaehler_torus());
        v.push_back(models::sphere_torus_product());
        return v;
    }();
    return all;
}

inline const ManifoldModel& find_model(const std::string& name) {
    for (const auto& m : catalog())
        if (m.name == name) return m;
    throw ConfigError("unknown model '" + name + "'");
}

}  // namespace holoflow
