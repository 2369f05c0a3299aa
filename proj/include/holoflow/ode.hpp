#pragma once

// Fixed-step fourth-order Runge-Kutta integrators. Fixed stepping keeps the
// integration error a smooth function of parameters and endpoints, which the
// differencing-based checks rely on.

#include <functional>

#include "holoflow/linalg.hpp"

namespace holoflow {

inline Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& y,
                    double h) {
    Vec k1 = f(t, y);
    Vec y2 = y;
    vec_axpy(y2, 0.5 * h, k1);
    Vec k2 = f(t + 0.5 * h, y2);
    Vec y3 = y;
    vec_axpy(y3, 0.5 * h, k2);
    Vec k3 = f(t + 0.5 * h, y3);
    Vec y4 = y;
    vec_axpy(y4, h, k3);
    Vec k4 = f(t + h, y4);
    Vec out = y;
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

inline Vec rk4_integrate(const std::function<Vec(double, const Vec&)>& f, Vec y, double t0,
                         double t1, int nsteps) {
    const double h = (t1 - t0) / nsteps;
    for (int k = 0; k < nsteps; ++k) y = rk4_step(f, t0 + k * h, y, h);
    return y;
}

// dP/ds = A(s) P, one step
inline Mat rk4_matrix_step(const std::function<Mat(double)>& A, double s, const Mat& P,
                           double h) {
    Mat k1 = A(s) * P;
    Mat k2 = A(s + 0.5 * h) * (P + k1 * (0.5 * h));
    Mat k3 = A(s + 0.5 * h) * (P + k2 * (0.5 * h));
    Mat k4 = A(s + h) * (P + k3 * h);
    return P + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

inline Mat rk4_matrix(const std::function<Mat(double)>& A, Mat P, double s0, double s1,
                      int nsteps) {
    const double h = (s1 - s0) / nsteps;
    for (int k = 0; k < nsteps; ++k) P = rk4_matrix_step(A, s0 + k * h, P, h);
    return P;
}

}  // namespace holoflow
