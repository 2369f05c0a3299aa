#pragma once

// Coefficient flow integration. The flow state holds the dense integration
// grid so that later interpolation is as accurate as the integration itself.
// The anchor time t0 (where the evolving frames are pinned to the identity)
// is always an exact grid point.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "holoflow/geometry.hpp"
#include "holoflow/model.hpp"
#include "holoflow/ode.hpp"

namespace holoflow {

// The flow left the admissible regime before reaching the requested horizon.
struct ExtinctionError : Error {
    double t_critical;
    std::string reason;  // "inadmissible" | "curvature_bound"
    ExtinctionError(double t, std::string r)
        : Error("flow extinct at t=" + std::to_string(t) + " (" + r + ")"),
          t_critical(t),
          reason(std::move(r)) {}
};

struct StepControl {
    double step_factor = 1e-3;    // target step as a fraction of the horizon
    double err_per_time = 1e-10;  // step-halving disagreement budget per unit time
    double curvature_margin = 10.0;  // guard factor; <= 0 disables the guard
    int guard_stride = 32;           // steps between guard evaluations
    int min_steps = 16;              // per sub-interval
    int max_refine = 3;
};

// Frobenius magnitude of the curvature tensor in an orthonormal frame.
inline double curvature_magnitude(const CurvaturePack& cp) {
    const int n = cp.dim;
    double low[4][4][4][4];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (int m = 0; m < n; ++m) s += cp.rm[i][j][k][m] * cp.g(m, l);
                    low[i][j][k][l] = s;
                }
    double sum = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k)
                                for (int l = 0; l < n; ++l)
                                    s += cp.frame(i, a) * cp.frame(j, b) * cp.frame(k, c) *
                                         cp.frame(l, d) * low[i][j][k][l];
                    sum += s * s;
                }
    return std::sqrt(sum);
}

struct FlowState {
    const ManifoldModel* model = nullptr;
    double t0 = 0, T = 0;
    std::vector<double> times;  // ascending dense grid over [0, T]
    std::vector<Vec> thetas;
    std::vector<Vec> slopes;  // flow_rhs at each grid point
    std::size_t t0_index = 0;

    const Vec& theta_anchor() const { return thetas[t0_index]; }

    Vec theta_at(double t) const {
        const double slack = 1e-9 * std::max(1.0, T);
        if (t < times.front() - slack || t > times.back() + slack)
            throw DomainError("theta_at: time outside the integrated range");
        t = std::clamp(t, times.front(), times.back());
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = std::min(times.size() - 1,
                                  std::size_t(std::max<std::ptrdiff_t>(1, it - times.begin())));
        std::size_t lo = hi - 1;
        const double h = times[hi] - times[lo];
        const double u = (t - times[lo]) / h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        const double h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u);
        const double h11 = u * u * (u - 1);
        Vec out(thetas[lo].size());
        for (std::size_t a = 0; a < out.size(); ++a)
            out[a] = h00 * thetas[lo][a] + h * h10 * slopes[lo][a] + h01 * thetas[hi][a] +
                     h * h11 * slopes[hi][a];
        return out;
    }

    // exact derivative of the Hermite interpolant
    Vec theta_rate_at(double t) const {
        const double slack = 1e-9 * std::max(1.0, T);
        if (t < times.front() - slack || t > times.back() + slack)
            throw DomainError("theta_rate_at: time outside the integrated range");
        t = std::clamp(t, times.front(), times.back());
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = std::min(times.size() - 1,
                                  std::size_t(std::max<std::ptrdiff_t>(1, it - times.begin())));
        std::size_t lo = hi - 1;
        const double h = times[hi] - times[lo];
        const double u = (t - times[lo]) / h;
        const double d00 = (6 * u * u - 6 * u) / h;
        const double d10 = 3 * u * u - 4 * u + 1;
        const double d01 = (6 * u - 6 * u * u) / h;
        const double d11 = 3 * u * u - 2 * u;
        Vec out(thetas[lo].size());
        for (std::size_t a = 0; a < out.size(); ++a)
            out[a] = d00 * thetas[lo][a] + d10 * slopes[lo][a] + d01 * thetas[hi][a] +
                     d11 * slopes[hi][a];
        return out;
    }
};

namespace detail {

struct GuardState {
    bool enabled = false;
    double threshold = 0;
    int stride = 32;
};

inline void flow_span(const ManifoldModel& M, FlowState& fs, double from, double to, int nsteps,
                      const GuardState& guard) {
    Vec theta = fs.thetas.back();
    const double h = (to - from) / nsteps;
    auto rhs = [&M](double, const Vec& y) { return M.flow_rhs(y); };
    for (int k = 0; k < nsteps; ++k) {
        const double t = from + k * h;
        theta = rk4_step(rhs, t, theta, h);
        const double t_next = from + (k + 1) * h;
        if (!M.admissible(theta)) throw ExtinctionError(t_next, "inadmissible");
        if (guard.enabled && ((k + 1) % guard.stride == 0 || k + 1 == nsteps)) {
            auto cp = curvature_at(M, M.basepoint, theta, CurvLevel::curvature);
            if (curvature_magnitude(cp) > guard.threshold)
                throw ExtinctionError(t_next, "curvature_bound");
        }
        fs.times.push_back(t_next);
        fs.thetas.push_back(theta);
        fs.slopes.push_back(M.flow_rhs(theta));
    }
}

}  // namespace detail

// Integrate theta' = flow_rhs(theta) over [0, T] with theta(0) = theta0,
// recording the dense grid. t0 in [0, T] becomes an exact grid point.
inline FlowState integrate_flow(const ManifoldModel& M, const Vec& theta0, double t0, double T,
                                const StepControl& ctl = {}) {
    if (!(T > 0)) throw ParameterError("integrate_flow: horizon must be positive");
    if (t0 < 0 || t0 > T) throw ParameterError("integrate_flow: anchor time outside [0, T]");
    if (!M.admissible(theta0))
        throw ParameterError("integrate_flow: initial coefficients are not admissible");

    detail::GuardState guard;
    if (ctl.curvature_margin > 0) {
        auto cp0 = curvature_at(M, M.basepoint, theta0, CurvLevel::curvature);
        guard.enabled = true;
        guard.threshold = ctl.curvature_margin * (curvature_magnitude(cp0) + 1.0);
        guard.stride = std::max(1, ctl.guard_stride);
    }

    const double h_target = ctl.step_factor * T;
    auto steps_for = [&](double span) {
        if (span <= 0) return 0;
        return std::max(ctl.min_steps, int(std::ceil(span / h_target)));
    };

    auto run = [&](int mult) {
        FlowState fs;
        fs.model = &M;
        fs.t0 = t0;
        fs.T = T;
        fs.times.push_back(0.0);
        fs.thetas.push_back(theta0);
        fs.slopes.push_back(M.flow_rhs(theta0));
        const int n1 = steps_for(t0) * mult;
        const int n2 = steps_for(T - t0) * mult;
        if (n1 > 0) detail::flow_span(M, fs, 0.0, t0, n1, guard);
        fs.t0_index = fs.times.size() - 1;
        if (n2 > 0) detail::flow_span(M, fs, t0, T, n2, guard);
        return fs;
    };

    FlowState fine = run(1);
    for (int refine = 0; refine <= ctl.max_refine; ++refine) {
        FlowState finer = run(2 << refine);
        double disagree = 0;
        for (std::size_t a = 0; a < fine.thetas.back().size(); ++a)
            disagree = std::max(disagree,
                                std::fabs(fine.thetas.back()[a] - finer.thetas.back()[a]));
        if (disagree <= ctl.err_per_time * T) break;
        fine = std::move(finer);
        if (refine == ctl.max_refine)
            throw ContractError("integrate_flow: step halving failed to converge");
    }
    return fine;
}

}  // namespace holoflow
