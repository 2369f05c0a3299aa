#pragma once

// Catalog model types: chart-based Riemannian metric families g(x, theta)
// with a coefficient flow, deck transforms for quotient identifications,
// canonical loops, parallel structures and the expected holonomy descriptor.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holoflow/linalg.hpp"

namespace holoflow {

struct ChartPoint {
    Vec x;
};

// Metric value and its chart derivatives at a point. Capacity is fixed at
// dim <= 4; only entries below `order` and `dim` are meaningful.
struct MetricDerivs {
    int dim = 0;
    int order = 0;           // highest derivative filled (0..3)
    Mat g;                   // g_ij
    double d1[4][4][4] = {};          // [k][i][j]       = d_k g_ij
    double d2[4][4][4][4] = {};       // [k][l][i][j]    = d_k d_l g_ij
    double d3[4][4][4][4][4] = {};    // [k][l][m][i][j] = d_k d_l d_m g_ij
};

struct DeckTransform {
    std::string label;
    std::function<Vec(const Vec&)> map;
    std::function<Mat(const Vec&)> differential;
};

// One smooth piece of a loop, parameterized over [0,1] with an analytic
// velocity supplier.
struct Segment {
    std::function<Vec(double)> pos;
    std::function<Vec(double)> vel;
};

// Piecewise-smooth loop. junction[i] is the index (into the model's deck
// list) of the deck transform applied at the end of segment i, or -1. After
// the final junction the path must land on the basepoint again.
struct LoopPath {
    Vec basepoint;
    std::vector<Segment> segments;
    std::vector<int> junctions;
};

struct NamedLoop {
    std::string label;
    LoopPath path;
};

enum class HolFamily {
    trivial,
    z2_reflection,
    so2_block,
    o2_block,
    so3,
    u1_kaehler,
    product_block
};

inline const char* family_name(HolFamily f) {
    switch (f) {
        case HolFamily::trivial: return "trivial";
        case HolFamily::z2_reflection: return "z2_reflection";
        case HolFamily::so2_block: return "so2_block";
        case HolFamily::o2_block: return "o2_block";
        case HolFamily::so3: return "so3";
        case HolFamily::u1_kaehler: return "u1_kaehler";
        case HolFamily::product_block: return "product_block";
    }
    return "?";
}

struct DescriptorBlock {
    enum Kind { fixed, rotation, orthogonal } kind;
    std::vector<int> indices;
};

struct HolonomyDescriptor {
    HolFamily family = HolFamily::trivial;
    std::vector<DescriptorBlock> blocks;  // coordinate-aligned partition
    std::vector<int> flip_indices;        // z2_reflection only
    double tolerance = 1e-6;

    // dimension of the Lie algebra of the expected group
    int algebra_dim() const {
        switch (family) {
            case HolFamily::trivial:
            case HolFamily::z2_reflection: return 0;
            case HolFamily::so2_block:
            case HolFamily::o2_block:
            case HolFamily::u1_kaehler: return 1;
            case HolFamily::so3: return 3;
            case HolFamily::product_block: {
                int d = 0;
                for (const auto& b : blocks) {
                    if (b.kind == DescriptorBlock::fixed) continue;
                    const int m = int(b.indices.size());
                    d += m * (m - 1) / 2;
                }
                return d;
            }
        }
        return 0;
    }
};

enum class StructureTag { projection, complex_structure };

struct ParallelStructure {
    StructureTag tag;
    std::string label;
    std::function<Mat(const Vec& x, const Vec& theta)> field;
};

struct ManifoldModel {
    std::string name;
    int dim = 0;
    Vec box_lo, box_hi;  // chart domain (singular margins already excluded)

    std::function<Mat(const Vec& x, const Vec& theta)> metric;
    // analytic derivative supplier; absent -> finite-difference fallback
    std::function<MetricDerivs(const Vec& x, const Vec& theta, int order)> metric_derivs;
    std::function<Vec(const Vec& theta)> flow_rhs;
    std::function<bool(const Vec& theta)> admissible;
    std::optional<std::function<Vec(double t, const Vec& theta0)>> closed_form_flow;

    std::vector<DeckTransform> decks;
    std::vector<ParallelStructure> structures;
    HolonomyDescriptor holonomy;
    std::vector<NamedLoop> loops;

    Vec basepoint;
    Vec theta_default;
    double T_default = 0.2;
    double t0_default = 0.1;
    Segment probe;  // open curve from the basepoint, for rate checks
    Vec theta_sample_lo, theta_sample_hi;

    bool kaehler() const {
        for (const auto& s : structures)
            if (s.tag == StructureTag::complex_structure) return true;
        return false;
    }
    bool in_domain(const Vec& x) const {
        for (int i = 0; i < dim; ++i)
            if (x[std::size_t(i)] < box_lo[std::size_t(i)] ||
                x[std::size_t(i)] > box_hi[std::size_t(i)])
                return false;
        return true;
    }
    void require_in_domain(const Vec& x) const {
        if (!in_domain(x))
            throw DomainError(name + ": chart point outside the admissible domain box");
    }
    const DeckTransform& deck(int idx) const {
        if (idx < 0 || idx >= int(decks.size()))
            throw ContractError(name + ": deck index out of range");
        return decks[std::size_t(idx)];
    }
    const NamedLoop& loop(const std::string& label) const {
        for (const auto& l : loops)
            if (l.label == label) return l;
        throw ConfigError(name + ": no canonical loop named '" + label + "'");
    }
};

namespace detail {

inline double offblock_residual(const Mat& p, const std::vector<DescriptorBlock>& blocks) {
    const int n = p.dim();
    std::vector<int> block_of(std::size_t(n), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int i : blocks[b].indices) block_of[std::size_t(i)] = int(b);
    double s = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (block_of[std::size_t(i)] != block_of[std::size_t(j)]) s += p(i, j) * p(i, j);
    return std::sqrt(s) / std::sqrt(double(n));
}

inline Mat submatrix(const Mat& p, const std::vector<int>& idx) {
    Mat s(int(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            s(int(i), int(j)) = p(idx[i], idx[j]);
    return s;
}

inline double fixed_block_residual(const Mat& p, const std::vector<int>& idx) {
    double s = 0;
    for (int i : idx)
        for (int j : idx) {
            const double d = p(i, j) - (i == j ? 1.0 : 0.0);
            s += d * d;
        }
    return std::sqrt(s) / std::sqrt(double(p.dim()));
}

}  // namespace detail

// Distance-style residual measuring how far p is from the group described by
// the descriptor, with respect to the metric g and the model's parallel
// structures evaluated at the basepoint. Zero (to numerical accuracy) iff p
// lies in the expected holonomy group.
inline double holonomy_membership(const HolonomyDescriptor& desc, const Mat& p, const Metric& g,
                                  const std::vector<std::pair<StructureTag, Mat>>& structures = {}) {
    const int n = p.dim();
    const double sq = std::sqrt(double(n));
    Mat ptgp = p.transposed() * g.gram() * p;
    double res = (ptgp - g.gram()).frobenius() / g.gram().frobenius();

    auto block_terms = [&](bool det_constrained) {
        double r = 0.0;
        if (desc.blocks.empty())
            throw ConfigError("holonomy_membership: block family needs a block partition");
        r += detail::offblock_residual(p, desc.blocks);
        for (const auto& b : desc.blocks) {
            if (b.kind == DescriptorBlock::fixed) {
                r += detail::fixed_block_residual(p, b.indices);
            } else if (det_constrained || b.kind == DescriptorBlock::rotation) {
                r += std::fabs(mat_det(detail::submatrix(p, b.indices)) - 1.0);
            }
        }
        for (const auto& [tag, s] : structures)
            if (tag == StructureTag::projection) r += commutator(p, s).frobenius() / sq;
        return r;
    };

    switch (desc.family) {
        case HolFamily::trivial:
            res += (p - Mat::identity(n)).frobenius() / sq;
            break;
        case HolFamily::z2_reflection: {
            Mat refl = Mat::identity(n);
            for (int i : desc.flip_indices) refl(i, i) = -1.0;
            res += std::min((p - Mat::identity(n)).frobenius(), (p - refl).frobenius()) / sq;
            break;
        }
        case HolFamily::so2_block:
        case HolFamily::product_block:
            res += block_terms(true);
            break;
        case HolFamily::o2_block:
            res += block_terms(false);
            break;
        case HolFamily::so3:
            res += std::fabs(mat_det(p) - 1.0);
            break;
        case HolFamily::u1_kaehler: {
            const Mat* J = nullptr;
            for (const auto& [tag, s] : structures)
                if (tag == StructureTag::complex_structure) J = &s;
            if (!J)
                throw ConfigError(
                    "holonomy_membership: u1_kaehler family needs a complex structure");
            res += commutator(p, *J).frobenius() / sq;
            break;
        }
    }
    return res;
}

// Determinant of p restricted to each non-fixed block (empty when the
// descriptor has no block partition). Used to track discrete holonomy
// components such as the orientation class on a reflected block.
inline std::vector<double> block_determinants(const HolonomyDescriptor& desc, const Mat& p) {
    std::vector<double> dets;
    for (const auto& b : desc.blocks)
        if (b.kind != DescriptorBlock::fixed)
            dets.push_back(mat_det(detail::submatrix(p, b.indices)));
    return dets;
}

}  // namespace holoflow
