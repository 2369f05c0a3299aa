#pragma once

// Dense linear algebra for dimensions <= 4. Everything is allocated on the
// heap-free small side and kept deliberately simple: the geometry downstream
// never exceeds 4x4.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace holoflow {

using Vec = std::vector<double>;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};
struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

inline Vec vec_add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
inline Vec vec_scale(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}
inline void vec_axpy(Vec& y, double c, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}
inline double vec_dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double vec_norm_inf(const Vec& a) {
    double s = 0;
    for (double v : a) s = std::max(s, std::fabs(v));
    return s;
}
inline double vec_norm2(const Vec& a) { return std::sqrt(vec_dot(a, a)); }

// Square matrix, row major. Also serves as the endomorphism type ("square
// map") throughout: column j holds the image of the j-th basis vector.
class Mat {
  public:
    Mat() : n_(0) {}
    explicit Mat(int n, double fill = 0.0) : n_(n), a_(std::size_t(n) * n, fill) {}
    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[std::size_t(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * n_ + j]; }

    Mat& operator+=(const Mat& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Mat& operator*=(double c) {
        for (double& v : a_) v *= c;
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double c, Mat a) { return a *= c; }
    friend Mat operator*(Mat a, double c) { return a *= c; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    Vec apply(const Vec& x) const {
        Vec y(n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }
    Mat transposed() const {
        Mat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    double frobenius() const {
        double s = 0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0;
        for (double v : a_) s = std::max(s, std::fabs(v));
        return s;
    }
    const std::vector<double>& data() const { return a_; }

  private:
    int n_;
    std::vector<double> a_;
};

inline double frobenius_inner(const Mat& a, const Mat& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

// Gaussian elimination with partial pivoting; rhs columns solved in place.
inline Mat mat_solve(Mat a, Mat rhs) {
    const int n = a.dim();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) < 1e-300)
            throw ContractError("mat_solve: singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(rhs(piv, j), rhs(col, j));
            }
        const double d = a(col, col);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                rhs(r, j) -= f * rhs(col, j);
            }
        }
    }
    for (int r = 0; r < n; ++r) {
        const double d = a(r, r);
        for (int j = 0; j < n; ++j) rhs(r, j) /= d;
    }
    return rhs;
}

inline Mat mat_inverse(const Mat& a) { return mat_solve(a, Mat::identity(a.dim())); }

inline Vec mat_solve(const Mat& a, const Vec& b) {
    Mat rhs(a.dim());
    for (int i = 0; i < a.dim(); ++i) rhs(i, 0) = b[std::size_t(i)];
    const Mat x = mat_solve(a, rhs);
    Vec out(b.size());
    for (int i = 0; i < a.dim(); ++i) out[std::size_t(i)] = x(i, 0);
    return out;
}

inline double mat_det(Mat a) {
    const int n = a.dim();
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) == 0.0) return 0.0;
        if (piv != col) {
            det = -det;
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

// Spectral norm via power iteration on A^T A (deterministic start).
inline double op_norm_2(const Mat& a) {
    const int n = a.dim();
    Mat m = a.transposed() * a;
    Vec v(n, 1.0);
    double lam = 0;
    for (int it = 0; it < 100; ++it) {
        Vec w = m.apply(v);
        double nw = vec_norm2(w);
        if (nw == 0.0) return 0.0;
        lam = nw;
        v = vec_scale(1.0 / nw, w);
    }
    return std::sqrt(lam);
}

// Symmetric positive definite bilinear form at a point.
class Metric {
  public:
    Metric() = default;
    explicit Metric(const Mat& gram) : g_(gram) {
        const int n = g_.dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                if (g_(i, j) != g_(j, i))
                    throw ContractError("Metric: gram matrix not symmetric");
        // positive definiteness via leading principal minors
        for (int k = 1; k <= n; ++k) {
            Mat sub(k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = g_(i, j);
            if (mat_det(sub) <= 0.0)
                throw ParameterError("Metric: gram matrix not positive definite");
        }
        inv_ = mat_inverse(g_);
    }
    int dim() const { return g_.dim(); }
    const Mat& gram() const { return g_; }
    const Mat& inverse() const { return inv_; }
    double inner(const Vec& x, const Vec& y) const { return vec_dot(x, g_.apply(y)); }
    double norm(const Vec& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

  private:
    Mat g_, inv_;
};

// Gram-Schmidt over the metric applied to the coordinate basis in the given
// order; returns the frame matrix (column a = frame vector e_a).
inline Mat orthonormal_frame(const Metric& g, bool reversed_order = false) {
    const int n = g.dim();
    std::vector<Vec> basis;
    for (int step = 0; step < n; ++step) {
        int c = reversed_order ? n - 1 - step : step;
        Vec v(n, 0.0);
        v[c] = 1.0;
        for (const Vec& e : basis) vec_axpy(v, -g.inner(e, v), e);
        double nv = g.norm(v);
        if (nv < 1e-12) throw ContractError("orthonormal_frame: degenerate metric");
        basis.push_back(vec_scale(1.0 / nv, v));
    }
    Mat frame(n);
    for (int a = 0; a < n; ++a) {
        const Vec& e = basis[reversed_order ? std::size_t(n - 1 - a) : std::size_t(a)];
        for (int i = 0; i < n; ++i) frame(i, a) = e[i];
    }
    return frame;
}

// ||g a + (g a)^T||_F / max(1, ||g a||_F): zero iff a is antisymmetric with
// respect to g, i.e. a lies in so(V, g).
inline double antisymmetry_residual(const Mat& a, const Metric& g) {
    Mat ga = g.gram() * a;
    Mat s = ga + ga.transposed();
    return s.frobenius() / std::max(1.0, ga.frobenius());
}

inline Mat mat_exp(const Mat& a) {
    const int n = a.dim();
    double norm = a.frobenius();
    int squarings = 0;
    Mat b = a;
    while (norm > 0.5) {
        b *= 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Mat result = Mat::identity(n);
    Mat term = Mat::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = (1.0 / k) * (term * b);
        result += term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// Principal logarithm for maps near the identity (operator-norm distance
// < 0.5 required). Uses the atanh series on Z = (A-I)(A+I)^{-1}.
inline Mat mat_log_near_identity(const Mat& a) {
    const int n = a.dim();
    Mat dev = a - Mat::identity(n);
    if (op_norm_2(dev) >= 0.5)
        throw DomainError("mat_log_near_identity: argument too far from identity");
    Mat z = mat_solve((a + Mat::identity(n)).transposed(), dev.transposed()).transposed();
    Mat z2 = z * z;
    Mat result(n);
    Mat pow = z;
    for (int k = 1; k <= 41; k += 2) {
        result += (2.0 / k) * pow;
        if (pow.max_abs() < 1e-19) break;
        pow = pow * z2;
    }
    return result;
}

struct SpanProjection {
    Mat projection;
    double residual;
};

// Orthonormalizes the basis under the Frobenius pairing (rank tolerance
// relative to the largest element) and projects x onto the resulting span.
// Residual is ||x - proj||_F / max(1, ||x||_F).
inline SpanProjection project_onto_span(const Mat& x, const std::vector<Mat>& basis,
                                        double rank_tol = 1e-10) {
    double max_norm = 0.0;
    for (const Mat& b : basis) max_norm = std::max(max_norm, b.frobenius());
    std::vector<Mat> ortho;
    for (const Mat& b : basis) {
        Mat v = b;
        for (const Mat& e : ortho) v -= frobenius_inner(e, v) * e;
        // second pass for numerical orthogonality
        for (const Mat& e : ortho) v -= frobenius_inner(e, v) * e;
        double nv = v.frobenius();
        if (max_norm > 0.0 && nv > rank_tol * max_norm) ortho.push_back((1.0 / nv) * v);
    }
    Mat proj(x.dim());
    for (const Mat& e : ortho) proj += frobenius_inner(e, x) * e;
    double res = (x - proj).frobenius() / std::max(1.0, x.frobenius());
    return {proj, res};
}

// Frobenius-orthonormal basis of the span with a relative rank cutoff.
inline std::vector<Mat> orthonormal_span(const std::vector<Mat>& gens, double rank_tol = 1e-8) {
    double max_norm = 0.0;
    for (const Mat& g : gens) max_norm = std::max(max_norm, g.frobenius());
    std::vector<Mat> ortho;
    if (max_norm == 0.0) return ortho;
    for (const Mat& g : gens) {
        Mat v = g;
        for (const Mat& e : ortho) v -= frobenius_inner(e, v) * e;
        for (const Mat& e : ortho) v -= frobenius_inner(e, v) * e;
        double nv = v.frobenius();
        if (nv > rank_tol * max_norm) ortho.push_back((1.0 / nv) * v);
    }
    return ortho;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

}  // namespace holoflow
