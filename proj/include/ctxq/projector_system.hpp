#pragma once

// Projector systems (complete orthogonal sequences of projectors), their
// types as ordered partitions of n, refinements between partitions and the
// coarsening action they induce on systems and on spectrum points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxq/linalg.hpp"

namespace ctxq {

struct OrderedPartition {
    std::vector<std::size_t> parts;

    std::size_t length() const noexcept { return parts.size(); }
    std::size_t total() const { return std::accumulate(parts.begin(), parts.end(), std::size_t{0}); }
    bool operator==(const OrderedPartition &) const = default;
};

inline std::string to_string(const OrderedPartition &p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.parts.size(); ++i) s += (i ? "," : "") + std::to_string(p.parts[i]);
    return s + ")";
}

/// Reindexing r: {0..l-1} -> {0..m-1} from the fine partition `source`
/// (length l) to the coarse partition `target` (length m). Indices are
/// 0-based in memory; the JSON form is 1-based.
struct Refinement {
    std::vector<std::size_t> map;
    OrderedPartition source;
    OrderedPartition target;

    bool operator==(const Refinement &) const = default;
};

inline Refinement identity_refinement(const OrderedPartition &p) {
    Refinement r{std::vector<std::size_t>(p.length()), p, p};
    std::iota(r.map.begin(), r.map.end(), std::size_t{0});
    return r;
}

/// True iff target_j = sum_{r(i)=j} source_i for every j.
inline bool check_refinement(const Refinement &r) {
    if (r.map.size() != r.source.length()) {
        throw Error(ErrorKind::IndexOutOfRange, "refinement map has " + std::to_string(r.map.size()) +
                                                    " entries for a source of length " +
                                                    std::to_string(r.source.length()));
    }
    std::vector<std::size_t> sums(r.target.length(), 0);
    for (std::size_t i = 0; i < r.map.size(); ++i) {
        if (r.map[i] >= r.target.length()) {
            throw Error(ErrorKind::IndexOutOfRange, "refinement maps index " + std::to_string(i + 1) + " to " +
                                                        std::to_string(r.map[i] + 1) + " outside target of length " +
                                                        std::to_string(r.target.length()));
        }
        sums[r.map[i]] += r.source.parts[i];
    }
    return sums == r.target.parts;
}

/// The refinement s o r: apply r first, then s.
inline Refinement compose(const Refinement &r, const Refinement &s) {
    if (r.target != s.source) {
        throw Error(ErrorKind::TypeMismatch, "cannot compose " + to_string(r.source) + "->" + to_string(r.target) +
                                                 " with " + to_string(s.source) + "->" + to_string(s.target));
    }
    Refinement out{std::vector<std::size_t>(r.map.size()), r.source, s.target};
    for (std::size_t i = 0; i < r.map.size(); ++i) out.map[i] = s.map.at(r.map[i]);
    return out;
}

inline std::size_t coarsen_point(const Refinement &r, std::size_t i) {
    if (i >= r.map.size()) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "point " + std::to_string(i + 1) + " outside spectrum of size " + std::to_string(r.map.size()));
    }
    return r.map[i];
}

class ProjectorSystem;
ProjectorSystem validate_system(std::vector<CMatrix> mats, const Tolerance &tol);

class ProjectorSystem {
public:
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return projectors_.size(); }
    const std::vector<CMatrix> &projectors() const noexcept { return projectors_; }
    const CMatrix &operator[](std::size_t i) const { return projectors_.at(i); }
    const OrderedPartition &type() const noexcept { return type_; }

private:
    friend ProjectorSystem validate_system(std::vector<CMatrix> mats, const Tolerance &tol);
    ProjectorSystem(std::size_t dim, std::vector<CMatrix> p, OrderedPartition t)
        : dim_(dim), projectors_(std::move(p)), type_(std::move(t)) {}

    std::size_t dim_ = 0;
    std::vector<CMatrix> projectors_;
    OrderedPartition type_;
};

/// Checks that `mats` is a complete orthogonal sequence of projectors with
/// positive integer traces.
inline ProjectorSystem validate_system(std::vector<CMatrix> mats, const Tolerance &tol = {}) {
    if (mats.empty()) throw Error(ErrorKind::DimensionMismatch, "projector system is empty");
    const std::size_t n = mats.front().n();
    OrderedPartition type;
    CMatrix sum(n);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        if (mats[i].n() != n) {
            throw Error(ErrorKind::DimensionMismatch, "projector " + std::to_string(i + 1) + " has dimension " +
                                                          std::to_string(mats[i].n()) + ", expected " +
                                                          std::to_string(n));
        }
        if (!is_projector(mats[i], tol)) throw Error(ErrorKind::NotProjector, "index " + std::to_string(i + 1));
        const double tr = trace(mats[i]).real();
        const double rounded = std::round(tr);
        if (std::abs(tr - rounded) >= tol.eps() || rounded < 1.0) {
            throw Error(ErrorKind::NonIntegerTrace, "index " + std::to_string(i + 1) + " has trace " + std::to_string(tr));
        }
        type.parts.push_back(static_cast<std::size_t>(rounded));
        sum += mats[i];
    }
    for (std::size_t i = 0; i < mats.size(); ++i)
        for (std::size_t j = i + 1; j < mats.size(); ++j)
            if (!(frobenius_norm(mats[i] * mats[j]) < tol.eps()))
                throw Error(ErrorKind::NotOrthogonal, "indices " + std::to_string(i + 1) + " and " + std::to_string(j + 1));
    if (!(frobenius_norm(sum - CMatrix::identity(n)) < tol.eps())) {
        throw Error(ErrorKind::NotComplete, "||sum - I||_F = " + std::to_string(frobenius_norm(sum - CMatrix::identity(n))));
    }
    return ProjectorSystem(n, std::move(mats), std::move(type));
}

inline const OrderedPartition &type_of(const ProjectorSystem &s) { return s.type(); }

/// Proj(r): output projector j is the sum of the inputs i with r(i) = j.
inline ProjectorSystem coarsen(const ProjectorSystem &s, const Refinement &r, const Tolerance &tol = {}) {
    if (s.type() != r.source) {
        throw Error(ErrorKind::TypeMismatch, "system of type " + to_string(s.type()) +
                                                 " does not match refinement source " + to_string(r.source));
    }
    if (!check_refinement(r)) {
        throw Error(ErrorKind::TypeMismatch,
                    "map does not refine " + to_string(r.source) + " into " + to_string(r.target));
    }
    std::vector<CMatrix> out(r.target.length(), CMatrix(s.dim()));
    for (std::size_t i = 0; i < s.size(); ++i) out[r.map[i]] += s[i];
    return validate_system(std::move(out), tol);
}

/// Positional comparison: same length and each projector within tol.eps in
/// Frobenius norm.
inline bool approx_equal(const ProjectorSystem &a, const ProjectorSystem &b, const Tolerance &tol = {}) {
    if (a.dim() != b.dim() || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(frobenius_norm(a[i] - b[i]) < tol.eps())) return false;
    return true;
}

/// Witness r with coarsen(fine, r) = coarse, found by absorption:
/// r(i) = j iff ||C_j D_i - D_i||_F < eps. Returns nothing when some fine
/// projector is absorbed by zero or several coarse projectors, or when the
/// resulting coarsening does not reproduce `coarse`.
inline std::optional<Refinement> find_refinement(const ProjectorSystem &coarse, const ProjectorSystem &fine,
                                                 const Tolerance &tol = {}) {
    if (coarse.dim() != fine.dim() || coarse.size() > fine.size()) return std::nullopt;
    Refinement r{std::vector<std::size_t>(fine.size()), fine.type(), coarse.type()};
    for (std::size_t i = 0; i < fine.size(); ++i) {
        std::optional<std::size_t> hit;
        for (std::size_t j = 0; j < coarse.size(); ++j) {
            if (frobenius_norm(coarse[j] * fine[i] - fine[i]) < tol.eps()) {
                if (hit) return std::nullopt;
                hit = j;
            }
        }
        if (!hit) return std::nullopt;
        r.map[i] = *hit;
    }
    if (!check_refinement(r)) return std::nullopt;
    std::vector<CMatrix> sums(coarse.size(), CMatrix(fine.dim()));
    for (std::size_t i = 0; i < fine.size(); ++i) sums[r.map[i]] += fine[i];
    for (std::size_t j = 0; j < coarse.size(); ++j)
        if (!(frobenius_norm(sums[j] - coarse[j]) < tol.eps())) return std::nullopt;
    return r;
}

namespace detail {

inline constexpr double kCanonicalGrid = 1e-6;

inline std::int64_t quantize(double x) { return static_cast<std::int64_t>(std::llround(x / kCanonicalGrid)); }

inline std::vector<std::int64_t> quantized_entries(const CMatrix &m) {
    std::vector<std::int64_t> q;
    q.reserve(2 * m.n() * m.n());
    for (const auto &z : m.entries()) {
        q.push_back(quantize(z.real()));
        q.push_back(quantize(z.imag()));
    }
    return q;
}

}  // namespace detail

/// Deterministic ordering of a system's projectors: descending rank, then
/// lexicographic on entries quantized to a 1e-6 grid (row-major, real part
/// before imaginary part). Permutations of one system share a canonical form.
inline ProjectorSystem canonicalize(const ProjectorSystem &s, const Tolerance &tol = {}) {
    struct Keyed {
        std::size_t rank;
        std::vector<std::int64_t> key;
        std::size_t index;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) keyed.push_back({s.type().parts[i], detail::quantized_entries(s[i]), i});
    std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed &a, const Keyed &b) {
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.key < b.key;
    });
    std::vector<CMatrix> out;
    out.reserve(s.size());
    for (const auto &k : keyed) out.push_back(s[k.index]);
    return validate_system(std::move(out), tol);
}

}  // namespace ctxq
