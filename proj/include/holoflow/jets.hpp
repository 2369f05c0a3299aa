#pragma once

// Truncated multivariate Taylor arithmetic ("jets") in up to 4 variables,
// orders 1..3. Metric functors are templated over the scalar type; seeding
// the chart coordinates as jets yields exact partial derivatives of the
// metric through third order, which is what the curvature engine needs for
// nabla Rm. Unary functions are composed via Faa di Bruno.

#include <cmath>

namespace holoflow {

template <int Order>
struct Jet {
    static_assert(Order >= 1 && Order <= 3);
    int n = 0;
    double v = 0.0;
    double d1[4] = {};
    double d2[4][4] = {};
    double d3[4][4][4] = {};

    Jet() = default;
    Jet(int nvars, double value) : n(nvars), v(value) {}

    static Jet variable(int nvars, int which, double value) {
        Jet j(nvars, value);
        j.d1[which] = 1.0;
        return j;
    }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        for (int i = 0; i < n; ++i) d1[i] += o.d1[i];
        if constexpr (Order >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d2[i][j] += o.d2[i][j];
        if constexpr (Order >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) d3[i][j][k] += o.d3[i][j][k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        for (int i = 0; i < n; ++i) d1[i] -= o.d1[i];
        if constexpr (Order >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d2[i][j] -= o.d2[i][j];
        if constexpr (Order >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) d3[i][j][k] -= o.d3[i][j][k];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(const Jet& a) {
        Jet r(a.n, -a.v);
        for (int i = 0; i < a.n; ++i) r.d1[i] = -a.d1[i];
        if constexpr (Order >= 2)
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j) r.d2[i][j] = -a.d2[i][j];
        if constexpr (Order >= 3)
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j)
                    for (int k = 0; k < a.n; ++k) r.d3[i][j][k] = -a.d3[i][j][k];
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.n, a.v * b.v);
        const int n = a.n;
        for (int i = 0; i < n; ++i) r.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
        if constexpr (Order >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    r.d2[i][j] = a.d2[i][j] * b.v + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] +
                                 a.v * b.d2[i][j];
        if constexpr (Order >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        r.d3[i][j][k] = a.d3[i][j][k] * b.v + a.d2[i][j] * b.d1[k] +
                                        a.d2[i][k] * b.d1[j] + a.d2[j][k] * b.d1[i] +
                                        a.d1[i] * b.d2[j][k] + a.d1[j] * b.d2[i][k] +
                                        a.d1[k] * b.d2[i][j] + a.v * b.d3[i][j][k];
        return r;
    }

    // composition with a scalar function given by value and derivatives at v
    Jet compose(double f0, double f1, double f2, double f3) const {
        Jet r(n, f0);
        for (int i = 0; i < n; ++i) r.d1[i] = f1 * d1[i];
        if constexpr (Order >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) r.d2[i][j] = f2 * d1[i] * d1[j] + f1 * d2[i][j];
        if constexpr (Order >= 3)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        r.d3[i][j][k] = f3 * d1[i] * d1[j] * d1[k] +
                                        f2 * (d2[i][j] * d1[k] + d2[i][k] * d1[j] +
                                              d2[j][k] * d1[i]) +
                                        f1 * d3[i][j][k];
        return r;
    }

    friend Jet operator*(double c, const Jet& a) {
        Jet r = a;
        r.v *= c;
        for (int i = 0; i < a.n; ++i) r.d1[i] *= c;
        if constexpr (Order >= 2)
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j) r.d2[i][j] *= c;
        if constexpr (Order >= 3)
            for (int i = 0; i < a.n; ++i)
                for (int j = 0; j < a.n; ++j)
                    for (int k = 0; k < a.n; ++k) r.d3[i][j][k] *= c;
        return r;
    }
    friend Jet operator*(const Jet& a, double c) { return c * a; }
    friend Jet operator+(const Jet& a, double c) {
        Jet r = a;
        r.v += c;
        return r;
    }
    friend Jet operator+(double c, const Jet& a) { return a + c; }
    friend Jet operator-(const Jet& a, double c) { return a + (-c); }
    friend Jet operator-(double c, const Jet& a) { return (-a) + c; }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(double c, const Jet& b) { return c * reciprocal(b); }
    friend Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }

    friend Jet reciprocal(const Jet& a) {
        const double iv = 1.0 / a.v;
        return a.compose(iv, -iv * iv, 2.0 * iv * iv * iv, -6.0 * iv * iv * iv * iv);
    }
    friend Jet sqrt(const Jet& a) {
        const double s = std::sqrt(a.v);
        return a.compose(s, 0.5 / s, -0.25 / (s * a.v), 0.375 / (s * a.v * a.v));
    }
    friend Jet sin(const Jet& a) {
        const double s = std::sin(a.v), c = std::cos(a.v);
        return a.compose(s, c, -s, -c);
    }
    friend Jet cos(const Jet& a) {
        const double s = std::sin(a.v), c = std::cos(a.v);
        return a.compose(c, -s, -c, s);
    }
    friend Jet exp(const Jet& a) {
        const double e = std::exp(a.v);
        return a.compose(e, e, e, e);
    }
};

// Plain doubles satisfy the same interface so metric functors can be
// instantiated either way.
inline double reciprocal(double a) { return 1.0 / a; }

// A constant in the scalar type of `like` (zero derivatives for jets).
template <int Order>
Jet<Order> scalar_like(const Jet<Order>& like, double c) {
    Jet<Order> r(like.n, c);
    return r;
}
inline double scalar_like(double, double c) { return c; }

}  // namespace holoflow
