#pragma once

// Evolving orthonormal identification. At a fixed chart point q the frame
// map iota(t) solves
//     d iota / dt = Ric_endo(q, theta(t)) * iota,   iota(t0) = Id,
// which makes iota(t) an isometry from (T_q, g(t0)) to (T_q, g(t)):
// iota^T g(t) iota = g(t0) for all t. Tensors carried along the flow evolve
// fiberwise by the induced endomorphism action (the push-forward along
// iota(t) of their anchor value).

#include <cmath>
#include <vector>

#include "holoflow/flow.hpp"
#include "holoflow/geometry.hpp"
#include "holoflow/ode.hpp"
#include "holoflow/tensor.hpp"

namespace holoflow {

struct UhlenbeckPath {
    const FlowState* flow = nullptr;
    Vec q;
    std::vector<double> times;  // same grid as the flow state
    std::vector<Mat> frames;
    std::vector<Mat> slopes;  // Ric_endo * frame at each grid point

    Mat at(double t) const {
        const double slack = 1e-9 * std::max(1.0, times.back());
        if (t < times.front() - slack || t > times.back() + slack)
            throw DomainError("UhlenbeckPath::at: time outside the integrated range");
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
        Mat out = frames[lo] * h00 + slopes[lo] * (h * h10) + frames[hi] * h01 +
                  slopes[hi] * (h * h11);
        return out;
    }
};

namespace detail {

inline Mat ric_endo_at(const ManifoldModel& M, const Vec& q, const FlowState& fs, double t) {
    auto cp = curvature_at(M, q, fs.theta_at(t), CurvLevel::curvature);
    return cp.ric_endo();
}

}  // namespace detail

inline UhlenbeckPath integrate_uhlenbeck(const ManifoldModel& M, const FlowState& fs,
                                         const Vec& q) {
    M.require_in_domain(q);
    UhlenbeckPath up;
    up.flow = &fs;
    up.q = q;
    up.times = fs.times;
    up.frames.assign(fs.times.size(), Mat(M.dim));
    up.slopes.assign(fs.times.size(), Mat(M.dim));

    auto A = [&](double t) { return detail::ric_endo_at(M, q, fs, t); };
    const std::size_t k0 = fs.t0_index;
    up.frames[k0] = Mat::identity(M.dim);
    for (std::size_t k = k0; k + 1 < up.times.size(); ++k)
        up.frames[k + 1] =
            rk4_matrix_step(A, up.times[k], up.frames[k], up.times[k + 1] - up.times[k]);
    for (std::size_t k = k0; k > 0; --k)
        up.frames[k - 1] =
            rk4_matrix_step(A, up.times[k], up.frames[k], up.times[k - 1] - up.times[k]);
    for (std::size_t k = 0; k < up.times.size(); ++k)
        up.slopes[k] = A(up.times[k]) * up.frames[k];
    return up;
}

// Action of an endomorphism R on a tensor: + R on each contravariant slot,
// - R^T contraction on each covariant slot. This is the time derivative of
// the push-forward along a frame path with frame derivative R.
inline MultiTensor endo_slot_action(const MultiTensor& A, const Mat& R) {
    const int n = A.dim();
    MultiTensor out(n, A.contra_rank(), A.cov_rank());
    std::vector<int> idx(std::size_t(A.rank()), 0);
    const std::size_t total = A.size();
    for (std::size_t f = 0; f < total; ++f) {
        // decode flat index
        std::size_t rem = f;
        for (int s = A.rank() - 1; s >= 0; --s) {
            idx[std::size_t(s)] = int(rem % std::size_t(n));
            rem /= std::size_t(n);
        }
        double v = 0;
        std::vector<int> jdx = idx;
        for (int s = 0; s < A.rank(); ++s) {
            const bool contra = s < A.contra_rank();
            for (int c = 0; c < n; ++c) {
                jdx[std::size_t(s)] = c;
                const double av = A.at(jdx);
                v += contra ? R(idx[std::size_t(s)], c) * av : -R(c, idx[std::size_t(s)]) * av;
            }
            jdx[std::size_t(s)] = idx[std::size_t(s)];
        }
        out.flat_at(f) = v;
    }
    return out;
}

// Push a tensor forward along an invertible frame map: contravariant slots
// contract with L, covariant slots with L^{-1}.
inline MultiTensor push_tensor(const MultiTensor& A, const Mat& L) {
    const int n = A.dim();
    const Mat Linv = mat_inverse(L);
    MultiTensor out(n, A.contra_rank(), A.cov_rank());
    std::vector<int> idx(std::size_t(A.rank()), 0);
    std::vector<int> src(std::size_t(A.rank()), 0);
    const std::size_t total = A.size();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        for (int s = A.rank() - 1; s >= 0; --s) {
            idx[std::size_t(s)] = int(rem % std::size_t(n));
            rem /= std::size_t(n);
        }
        double v = 0;
        // sum over all source multi-indices
        const std::size_t inner = total;
        for (std::size_t gsrc = 0; gsrc < inner; ++gsrc) {
            std::size_t r = gsrc;
            for (int s = A.rank() - 1; s >= 0; --s) {
                src[std::size_t(s)] = int(r % std::size_t(n));
                r /= std::size_t(n);
            }
            double w = A.at(src);
            if (w == 0.0) continue;
            for (int s = 0; s < A.rank(); ++s) {
                const bool contra = s < A.contra_rank();
                w *= contra ? L(idx[std::size_t(s)], src[std::size_t(s)])
                            : Linv(src[std::size_t(s)], idx[std::size_t(s)]);
            }
            v += w;
        }
        out.flat_at(f) = v;
    }
    return out;
}

// Integrate the fiberwise evolution d A/dt = endo_slot_action(A, Ric_endo)
// from the anchor time to t_target along the flow grid.
inline MultiTensor evolve_tensor(const ManifoldModel& M, const FlowState& fs, const Vec& q,
                                 const MultiTensor& A0, double t_target) {
    const std::size_t k0 = fs.t0_index;
    auto R = [&](double t) { return detail::ric_endo_at(M, q, fs, t); };

    auto step = [&](MultiTensor A, double t, double h) {
        // RK4 on the flattened components
        MultiTensor k1 = endo_slot_action(A, R(t));
        MultiTensor a2 = A;
        for (std::size_t f = 0; f < A.size(); ++f) a2.flat_at(f) += 0.5 * h * k1.flat_at(f);
        MultiTensor k2 = endo_slot_action(a2, R(t + 0.5 * h));
        MultiTensor a3 = A;
        for (std::size_t f = 0; f < A.size(); ++f) a3.flat_at(f) += 0.5 * h * k2.flat_at(f);
        MultiTensor k3 = endo_slot_action(a3, R(t + 0.5 * h));
        MultiTensor a4 = A;
        for (std::size_t f = 0; f < A.size(); ++f) a4.flat_at(f) += h * k3.flat_at(f);
        MultiTensor k4 = endo_slot_action(a4, R(t + h));
        for (std::size_t f = 0; f < A.size(); ++f)
            A.flat_at(f) += h / 6.0 *
                            (k1.flat_at(f) + 2 * k2.flat_at(f) + 2 * k3.flat_at(f) +
                             k4.flat_at(f));
        return A;
    };

    MultiTensor A = A0;
    if (t_target >= fs.times[k0]) {
        std::size_t k = k0;
        while (k + 1 < fs.times.size() && fs.times[k + 1] <= t_target + 1e-15) {
            A = step(A, fs.times[k], fs.times[k + 1] - fs.times[k]);
            ++k;
        }
        if (t_target > fs.times[k] + 1e-15) A = step(A, fs.times[k], t_target - fs.times[k]);
    } else {
        std::size_t k = k0;
        while (k > 0 && fs.times[k - 1] >= t_target - 1e-15) {
            A = step(A, fs.times[k], fs.times[k - 1] - fs.times[k]);
            --k;
        }
        if (t_target < fs.times[k] - 1e-15) A = step(A, fs.times[k], t_target - fs.times[k]);
    }
    return A;
}

}  // namespace holoflow
