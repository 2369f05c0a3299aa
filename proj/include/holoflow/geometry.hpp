#pragma once

// Pointwise curvature engine. From a metric chart supplier this assembles,
// at a chosen depth:
//   connection   -> g, g^-1, Christoffel symbols
//   curvature    -> + Rm, Ric, scalar, orthonormal frame
//   derivatives  -> + dGamma, nabla Rm, nabla Ric, frame divergence of Rm
//
// Index conventions:
//   gamma[k][i][j]          Gamma^k_ij
//   rm[i][j][k][l]          R_ijk^l   (R(d_i,d_j)d_k = R_ijk^l d_l)
//   ric(i,j)                R_ij = R_kij^k
//   nabla_rm[m][i][j][k][l] (nabla_m R)_ijk^l
//   nabla_ric[k][i][j]      (nabla_k Ric)_ij

#include <cmath>
#include <functional>

#include "holoflow/jets.hpp"
#include "holoflow/linalg.hpp"
#include "holoflow/model.hpp"

namespace holoflow {

enum class CurvLevel { connection, curvature, derivatives };

struct CurvaturePack {
    int dim = 0;
    CurvLevel level = CurvLevel::connection;
    Mat g, g_inv;
    double gamma[4][4][4] = {};

    // level >= curvature
    Mat ric;
    double rm[4][4][4][4] = {};
    double scal = 0;
    Mat frame;  // columns orthonormal for g

    // level >= derivatives
    double dgamma[4][4][4][4] = {};         // [m][k][i][j] = d_m Gamma^k_ij
    double nabla_rm[4][4][4][4][4] = {};
    double nabla_ric[4][4][4] = {};
    double div_rm_frame[4][4][4] = {};      // [a][b][c], see below

    // R(u,v) as an endomorphism matrix, rows = upper index
    Mat curvature_endo(const Vec& u, const Vec& v) const {
        Mat e(dim);
        for (int l = 0; l < dim; ++l)
            for (int k = 0; k < dim; ++k) {
                double s = 0;
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        s += u[std::size_t(i)] * v[std::size_t(j)] * rm[i][j][k][l];
                e(l, k) = s;
            }
        return e;
    }

    double sectional(const Vec& u, const Vec& v) const {
        Metric m(g);
        Vec rv = curvature_endo(u, v).apply(v);
        const double num = m.inner(rv, u);
        const double den = m.inner(u, u) * m.inner(v, v) - m.inner(u, v) * m.inner(u, v);
        if (den <= 0) throw ParameterError("sectional: degenerate plane");
        return num / den;
    }

    // Ricci endomorphism Ric^i_j = g^{ik} R_kj
    Mat ric_endo() const { return g_inv * ric; }

    // divergence term paired against frame vectors:
    //   div_rm_frame[a][b][c] = g( (div Rm)(e_a) e_c , e_b )
    // with ((div Rm)(X))^l_k = g^{mn} X^j (nabla_m R)_njk^l
    Mat div_rm_endo(const Vec& X) const {
        Mat e(dim);
        for (int l = 0; l < dim; ++l)
            for (int k = 0; k < dim; ++k) {
                double s = 0;
                for (int m = 0; m < dim; ++m)
                    for (int n = 0; n < dim; ++n)
                        for (int j = 0; j < dim; ++j)
                            s += g_inv(m, n) * X[std::size_t(j)] * nabla_rm[m][n][j][k][l];
                e(l, k) = s;
            }
        return e;
    }
};

namespace detail {

// ---- finite-difference fallback for metric chart derivatives ----

using MetricFn = std::function<Mat(const Vec&, const Vec&)>;

inline Mat fd_eval(const MetricFn& f, Vec x, const Vec& theta, int k, double dx, int k2 = -1,
                   double dx2 = 0) {
    x[std::size_t(k)] += dx;
    if (k2 >= 0) x[std::size_t(k2)] += dx2;
    return f(x, theta);
}

// first derivatives, five-point fourth-order stencil
inline void fd_d1(const MetricFn& f, const Vec& x, const Vec& theta, int dim,
                  double out[4][4][4], double hscale) {
    for (int k = 0; k < dim; ++k) {
        const double h = hscale * std::max(1.0, std::fabs(x[std::size_t(k)]));
        Mat d = (fd_eval(f, x, theta, k, -2 * h) - fd_eval(f, x, theta, k, 2 * h)) * (1.0 / 12.0) +
                (fd_eval(f, x, theta, k, h) - fd_eval(f, x, theta, k, -h)) * (8.0 / 12.0);
        d = d * (1.0 / h);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out[k][i][j] = d(i, j);
    }
}

inline void fd_d2(const MetricFn& f, const Vec& x, const Vec& theta, int dim,
                  double out[4][4][4][4], double hscale) {
    const Mat center = f(x, theta);
    for (int k = 0; k < dim; ++k) {
        const double hk = hscale * std::max(1.0, std::fabs(x[std::size_t(k)]));
        // diagonal entry, five-point fourth-order
        Mat d = (fd_eval(f, x, theta, k, 2 * hk) + fd_eval(f, x, theta, k, -2 * hk)) * (-1.0) +
                (fd_eval(f, x, theta, k, hk) + fd_eval(f, x, theta, k, -hk)) * 16.0 -
                center * 30.0;
        d = d * (1.0 / (12.0 * hk * hk));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out[k][k][i][j] = d(i, j);
        // mixed entries, cross stencil with one Richardson step
        for (int l = k + 1; l < dim; ++l) {
            const double hl = hscale * std::max(1.0, std::fabs(x[std::size_t(l)]));
            auto cross = [&](double a, double b) {
                return (fd_eval(f, x, theta, k, a, l, b) - fd_eval(f, x, theta, k, a, l, -b) -
                        fd_eval(f, x, theta, k, -a, l, b) + fd_eval(f, x, theta, k, -a, l, -b)) *
                       (1.0 / (4.0 * a * b));
            };
            Mat dm = cross(hk, hl) * (4.0 / 3.0) - cross(2 * hk, 2 * hl) * (1.0 / 3.0);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) out[k][l][i][j] = out[l][k][i][j] = dm(i, j);
        }
    }
}

inline void fd_d3(const MetricFn& f, const Vec& x, const Vec& theta, int dim,
                  double out[4][4][4][4][4], double h2scale, double h3scale) {
    // central difference of the second-derivative stencil
    double plus[4][4][4][4], minus[4][4][4][4];
    for (int k = 0; k < dim; ++k) {
        const double h = h3scale * std::max(1.0, std::fabs(x[std::size_t(k)]));
        Vec xp = x, xm = x;
        xp[std::size_t(k)] += h;
        xm[std::size_t(k)] -= h;
        fd_d2(f, xp, theta, dim, plus, h2scale);
        fd_d2(f, xm, theta, dim, minus, h2scale);
        for (int l = 0; l < dim; ++l)
            for (int m = 0; m < dim; ++m)
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        out[k][l][m][i][j] = (plus[l][m][i][j] - minus[l][m][i][j]) / (2 * h);
    }
}

}  // namespace detail

// Chart-derivative supplier by finite differences, used when a model carries
// no analytic supplier. Step sizes balance truncation against roundoff for
// smooth order-one metric coefficients.
inline MetricDerivs fd_metric_derivs(const detail::MetricFn& f, const Vec& x, const Vec& theta,
                                     int order, int dim) {
    MetricDerivs md;
    md.dim = dim;
    md.order = order;
    md.g = f(x, theta);
    if (order >= 1) detail::fd_d1(f, x, theta, dim, md.d1, 1e-4);
    if (order >= 2) detail::fd_d2(f, x, theta, dim, md.d2, 1e-3);
    if (order >= 3) detail::fd_d3(f, x, theta, dim, md.d3, 1e-3, 1.5e-3);
    return md;
}

namespace detail {

template <class F, int Order>
void jet_fill(const F& f, const Vec& x, const Vec& theta, int dim, MetricDerivs& md) {
    Jet<Order> xs[4];
    for (int k = 0; k < dim; ++k) xs[k] = Jet<Order>::variable(dim, k, x[std::size_t(k)]);
    Jet<Order> out[4][4];
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out[i][j] = Jet<Order>(dim, 0.0);
    f(xs, theta, out);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            md.g(i, j) = out[i][j].v;
            for (int k = 0; k < dim; ++k) {
                md.d1[k][i][j] = out[i][j].d1[k];
                if constexpr (Order >= 2)
                    for (int l = 0; l < dim; ++l) {
                        md.d2[k][l][i][j] = out[i][j].d2[k][l];
                        if constexpr (Order >= 3)
                            for (int m = 0; m < dim; ++m)
                                md.d3[k][l][m][i][j] = out[i][j].d3[k][l][m];
                    }
            }
        }
}

}  // namespace detail

// Wrap a templated metric functor (callable with double or Jet coordinates)
// into the model's two suppliers. The functor signature is
//   template<class T> void operator()(const T x[], const Vec& theta, T out[4][4]) const
template <class F>
std::function<Mat(const Vec&, const Vec&)> make_metric_fn(F f, int dim) {
    return [f, dim](const Vec& x, const Vec& theta) {
        double xs[4] = {};
        for (int k = 0; k < dim; ++k) xs[k] = x[std::size_t(k)];
        double out[4][4] = {};
        f(xs, theta, out);
        Mat g(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = out[i][j];
        return g;
    };
}

template <class F>
std::function<MetricDerivs(const Vec&, const Vec&, int)> make_jet_supplier(F f, int dim) {
    return [f, dim](const Vec& x, const Vec& theta, int order) {
        MetricDerivs md;
        md.dim = dim;
        md.order = order;
        md.g = Mat(dim);
        switch (order) {
            case 0: {
                md.g = make_metric_fn(f, dim)(x, theta);
                break;
            }
            case 1: detail::jet_fill<F, 1>(f, x, theta, dim, md); break;
            case 2: detail::jet_fill<F, 2>(f, x, theta, dim, md); break;
            case 3: detail::jet_fill<F, 3>(f, x, theta, dim, md); break;
            default: throw ContractError("metric derivative order must be 0..3");
        }
        return md;
    };
}

inline MetricDerivs metric_derivs_of(const ManifoldModel& M, const Vec& x, const Vec& theta,
                                     int order) {
    M.require_in_domain(x);
    if (M.metric_derivs) return M.metric_derivs(x, theta, order);
    return fd_metric_derivs(M.metric, x, theta, order, M.dim);
}

inline CurvaturePack curvature_at(const ManifoldModel& M, const Vec& x, const Vec& theta,
                                  CurvLevel level) {
    const int n = M.dim;
    const int order = level == CurvLevel::connection ? 1
                      : level == CurvLevel::curvature ? 2
                                                      : 3;
    const MetricDerivs md = metric_derivs_of(M, x, theta, order);

    CurvaturePack cp;
    cp.dim = n;
    cp.level = level;
    cp.g = md.g;
    Metric metric(md.g);
    cp.g_inv = metric.inverse();

    // A[l][i][j] = d_i g_jl + d_j g_il - d_l g_ij ;  Gamma^k_ij = g^{kl} A/2
    double A[4][4][4];
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                A[l][i][j] = md.d1[i][j][l] + md.d1[j][i][l] - md.d1[l][i][j];
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l) s += cp.g_inv(k, l) * A[l][i][j];
                cp.gamma[k][i][j] = 0.5 * s;
            }
    if (level == CurvLevel::connection) return cp;

    // d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    double dginv[4][4][4];
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        s += cp.g_inv(k, a) * md.d1[m][a][b] * cp.g_inv(b, l);
                dginv[m][k][l] = -s;
            }

    // d_m A[l][i][j]
    double dA[4][4][4][4];
    for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dA[m][l][i][j] = md.d2[m][i][j][l] + md.d2[m][j][i][l] - md.d2[m][l][i][j];

    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0;
                    for (int l = 0; l < n; ++l)
                        s += dginv[m][k][l] * A[l][i][j] + cp.g_inv(k, l) * dA[m][l][i][j];
                    cp.dgamma[m][k][i][j] = 0.5 * s;
                }

    // R_ijk^l = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk
    //           - Gamma^l_jm Gamma^m_ik
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = cp.dgamma[i][l][j][k] - cp.dgamma[j][l][i][k];
                    for (int m = 0; m < n; ++m)
                        s += cp.gamma[l][i][m] * cp.gamma[m][j][k] -
                             cp.gamma[l][j][m] * cp.gamma[m][i][k];
                    cp.rm[i][j][k][l] = s;
                }

    cp.ric = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += cp.rm[k][i][j][k];
            cp.ric(i, j) = s;
        }
    cp.scal = frobenius_inner(cp.g_inv, cp.ric);
    cp.frame = orthonormal_frame(metric);
    if (level == CurvLevel::curvature) return cp;

    // second chart derivatives of Gamma, then dRm
    double d2ginv[4][4][4][4];
    for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            s += dginv[m][k][a] * md.d1[q][a][b] * cp.g_inv(b, l) +
                                 cp.g_inv(k, a) * md.d2[m][q][a][b] * cp.g_inv(b, l) +
                                 cp.g_inv(k, a) * md.d1[q][a][b] * dginv[m][b][l];
                    d2ginv[m][q][k][l] = -s;
                }

    double d2gamma[4][4][4][4][4];  // [m][q][k][i][j] = d_m d_q Gamma^k_ij
    for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double s = 0;
                        for (int l = 0; l < n; ++l) {
                            const double d2Al = md.d3[m][q][i][j][l] + md.d3[m][q][j][i][l] -
                                                md.d3[m][q][l][i][j];
                            s += d2ginv[m][q][k][l] * A[l][i][j] + dginv[m][k][l] * dA[q][l][i][j] +
                                 dginv[q][k][l] * dA[m][l][i][j] + cp.g_inv(k, l) * d2Al;
                        }
                        d2gamma[m][q][k][i][j] = 0.5 * s;
                    }

    double drm[4][4][4][4][4];  // [m][i][j][k][l] = d_m R_ijk^l
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double s = d2gamma[m][i][l][j][k] - d2gamma[m][j][l][i][k];
                        for (int p = 0; p < n; ++p)
                            s += cp.dgamma[m][l][i][p] * cp.gamma[p][j][k] +
                                 cp.gamma[l][i][p] * cp.dgamma[m][p][j][k] -
                                 cp.dgamma[m][l][j][p] * cp.gamma[p][i][k] -
                                 cp.gamma[l][j][p] * cp.dgamma[m][p][i][k];
                        drm[m][i][j][k][l] = s;
                    }

    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double s = drm[m][i][j][k][l];
                        for (int p = 0; p < n; ++p)
                            s += -cp.gamma[p][m][i] * cp.rm[p][j][k][l] -
                                 cp.gamma[p][m][j] * cp.rm[i][p][k][l] -
                                 cp.gamma[p][m][k] * cp.rm[i][j][p][l] +
                                 cp.gamma[l][m][p] * cp.rm[i][j][k][p];
                        cp.nabla_rm[m][i][j][k][l] = s;
                    }

    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int p = 0; p < n; ++p) s += cp.nabla_rm[k][p][i][j][p];
                cp.nabla_ric[k][i][j] = s;
            }

    for (int a = 0; a < n; ++a) {
        Vec ea(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) ea[std::size_t(i)] = cp.frame(i, a);
        const Mat endo = cp.div_rm_endo(ea);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                Vec ec(std::size_t(n), 0.0);
                for (int i = 0; i < n; ++i) ec[std::size_t(i)] = cp.frame(i, c);
                const Vec w = endo.apply(ec);
                double v = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        v += cp.frame(i, b) * cp.g(i, j) * w[std::size_t(j)];
                cp.div_rm_frame[a][b][c] = v;
            }
    }

    return cp;
}

// Time derivative of the Christoffel symbols along the coefficient flow,
//   d/dt Gamma^k_ij = -g^{kl} ( nabla_i R_jl + nabla_j R_il - nabla_l R_ij )
// Requires a derivatives-level pack.
inline void christoffel_dot(const CurvaturePack& cp, double out[4][4][4]) {
    if (cp.level != CurvLevel::derivatives)
        throw ContractError("christoffel_dot needs a derivatives-level curvature pack");
    const int n = cp.dim;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l)
                    s += cp.g_inv(k, l) * (cp.nabla_ric[i][j][l] + cp.nabla_ric[j][i][l] -
                                           cp.nabla_ric[l][i][j]);
                out[k][i][j] = -s;
            }
}

// Rate of the metric coefficients along the model's coefficient flow,
// sum_a (dg/dtheta_a) rhs_a, by five-point differencing in theta.
inline Mat metric_flow_rate(const ManifoldModel& M, const Vec& x, const Vec& theta) {
    const Vec rhs = M.flow_rhs(theta);
    Mat rate(M.dim);
    for (std::size_t a = 0; a < theta.size(); ++a) {
        const double h = 1e-4 * std::max(1.0, std::fabs(theta[a]));
        auto at = [&](double dt) {
            Vec th = theta;
            th[a] += dt;
            return M.metric(x, th);
        };
        Mat d = (at(-2 * h) - at(2 * h)) * (1.0 / 12.0) + (at(h) - at(-h)) * (8.0 / 12.0);
        rate = rate + d * (rhs[a] / h);
    }
    return rate;
}

}  // namespace holoflow
