#pragma once

// Dense tensors over a single tangent space, mixed variance.
//
// Index convention (used everywhere in this library): the flat index tuple
// lists all contravariant (upper) slots first, then all covariant (lower)
// slots. raise/lower moves a slot across the group boundary: lowering a
// contravariant slot re-files the contracted index as the first covariant
// slot, raising a covariant slot re-files it as the last contravariant slot;
// the relative order of all other slots is preserved.

#include <vector>

#include "holoflow/linalg.hpp"

namespace holoflow {

class MultiTensor {
  public:
    MultiTensor() : dim_(0), contra_(0), cov_(0) {}
    MultiTensor(int dim, int contra_rank, int cov_rank)
        : dim_(dim), contra_(contra_rank), cov_(cov_rank) {
        std::size_t sz = 1;
        for (int s = 0; s < contra_ + cov_; ++s) sz *= std::size_t(dim_);
        a_.assign(sz, 0.0);
    }

    int dim() const { return dim_; }
    int contra_rank() const { return contra_; }
    int cov_rank() const { return cov_; }
    int rank() const { return contra_ + cov_; }
    std::size_t size() const { return a_.size(); }

    double& at(const std::vector<int>& idx) { return a_[flat(idx)]; }
    double at(const std::vector<int>& idx) const { return a_[flat(idx)]; }
    double& flat_at(std::size_t f) { return a_[f]; }
    double flat_at(std::size_t f) const { return a_[f]; }

    std::size_t flat(const std::vector<int>& idx) const {
        if (int(idx.size()) != rank()) throw ContractError("MultiTensor: wrong index rank");
        std::size_t f = 0;
        for (int s = 0; s < rank(); ++s) {
            if (idx[std::size_t(s)] < 0 || idx[std::size_t(s)] >= dim_)
                throw ContractError("MultiTensor: index out of range");
            f = f * std::size_t(dim_) + std::size_t(idx[std::size_t(s)]);
        }
        return f;
    }

    static MultiTensor from_matrix(const Mat& m) {
        MultiTensor t(m.dim(), 1, 1);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) t.at({i, j}) = m(i, j);
        return t;
    }
    // (1,1) tensors are endomorphisms: upper slot = row, lower slot = column.
    Mat as_matrix() const {
        if (contra_ != 1 || cov_ != 1)
            throw ContractError("MultiTensor::as_matrix: needs contra rank 1, cov rank 1");
        Mat m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = at({i, j});
        return m;
    }
    static MultiTensor from_bilinear(const Mat& m) {
        MultiTensor t(m.dim(), 0, 2);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) t.at({i, j}) = m(i, j);
        return t;
    }
    Mat as_bilinear() const {
        if (contra_ != 0 || cov_ != 2)
            throw ContractError("MultiTensor::as_bilinear: needs cov rank 2");
        Mat m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = at({i, j});
        return m;
    }

    double max_abs() const {
        double s = 0;
        for (double v : a_) s = std::max(s, std::fabs(v));
        return s;
    }
    double frobenius() const {
        double s = 0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    MultiTensor& operator+=(const MultiTensor& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    MultiTensor& operator-=(const MultiTensor& o) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    MultiTensor& operator*=(double c) {
        for (double& v : a_) v *= c;
        return *this;
    }
    friend MultiTensor operator+(MultiTensor a, const MultiTensor& b) { return a += b; }
    friend MultiTensor operator-(MultiTensor a, const MultiTensor& b) { return a -= b; }
    friend MultiTensor operator*(double c, MultiTensor a) { return a *= c; }

  private:
    int dim_, contra_, cov_;
    std::vector<double> a_;
};

enum class SlotMove { lower, raise };

// Contract one slot with the metric (lower) or its inverse (raise). `slot`
// addresses the flat index tuple; lowering requires a contravariant slot,
// raising a covariant one. See the header note for the resulting slot order.
inline MultiTensor raise_lower(const MultiTensor& t, int slot, SlotMove move, const Metric& g) {
    const int dim = t.dim();
    const int l = t.contra_rank(), k = t.cov_rank();
    if (move == SlotMove::lower) {
        if (slot < 0 || slot >= l)
            throw ContractError("raise_lower: lowering needs a contravariant slot");
    } else {
        if (slot < l || slot >= l + k)
            throw ContractError("raise_lower: raising needs a covariant slot");
    }
    const Mat& contraction = (move == SlotMove::lower) ? g.gram() : g.inverse();
    const int new_l = (move == SlotMove::lower) ? l - 1 : l + 1;
    const int new_k = (move == SlotMove::lower) ? k + 1 : k - 1;
    MultiTensor out(dim, new_l, new_k);

    // destination position of the moved slot in the new flat tuple
    const int moved_dst = (move == SlotMove::lower) ? new_l : new_l - 1;
    const int rank = l + k;
    std::vector<int> src(std::size_t(rank), 0), dst(std::size_t(rank), 0);
    const std::size_t total = t.size();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        for (int s = rank - 1; s >= 0; --s) {
            src[std::size_t(s)] = int(rem % std::size_t(dim));
            rem /= std::size_t(dim);
        }
        // map source slots (minus the moved one) onto destination slots,
        // order preserved
        int d = 0;
        for (int s = 0; s < rank; ++s) {
            if (s == slot) continue;
            if (d == moved_dst) ++d;
            dst[std::size_t(d)] = src[std::size_t(s)];
            ++d;
        }
        const double val = t.flat_at(f);
        if (val == 0.0) continue;
        for (int c = 0; c < dim; ++c) {
            dst[std::size_t(moved_dst)] = c;
            out.at(dst) += contraction(c, src[std::size_t(slot)]) * val;
        }
    }
    return out;
}

}  // namespace holoflow
