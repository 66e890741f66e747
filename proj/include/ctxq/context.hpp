#pragma once

// Contexts (canonical projector systems), the inclusion order between them,
// coarse-graining maps between their spectra, and finite posets of contexts
// assembled from commuting observable families.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxq/linalg.hpp"
#include "ctxq/projector_system.hpp"

namespace ctxq {

/// A commutative subalgebra, held as its canonical projector system. The
/// spectrum is the index set {0, .., system.size() - 1}.
struct Context {
    std::string id;
    ProjectorSystem system;

    std::size_t dim() const noexcept { return system.dim(); }
    std::size_t spectrum_size() const noexcept { return system.size(); }
};

/// Content hash (FNV-1a) of a canonical system's ranks and quantized entries.
inline std::string context_id(const ProjectorSystem &canonical) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(canonical.dim());
    mix(canonical.size());
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        mix(canonical.type().parts[i]);
        for (std::int64_t q : detail::quantized_entries(canonical[i])) mix(static_cast<std::uint64_t>(q));
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "c%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline Context make_context(const ProjectorSystem &s, const Tolerance &tol = {}) {
    ProjectorSystem canonical = canonicalize(s, tol);
    std::string id = context_id(canonical);
    return Context{std::move(id), std::move(canonical)};
}

/// The centre C1: the system [I], of type (n).
inline Context bottom_context(std::size_t n, const Tolerance &tol = {}) {
    return make_context(validate_system({CMatrix::identity(n)}, tol), tol);
}

inline bool is_bottom(const Context &c) { return c.spectrum_size() == 1; }

/// Context of the joint eigenspaces of a commuting Hermitian family.
inline Context generate_context(std::span<const CMatrix> observables, const Tolerance &tol = {}) {
    Context c = make_context(validate_system(simultaneous_diagonalization(observables, tol), tol), tol);
    for (std::size_t k = 0; k < observables.size(); ++k) {
        const CMatrix &o = observables[k];
        CMatrix rebuilt(o.n());
        for (std::size_t i = 0; i < c.system.size(); ++i) {
            const double lambda = trace(o * c.system[i]).real() / static_cast<double>(c.system.type().parts[i]);
            rebuilt += c.system[i] * Complex{lambda};
        }
        const double residual = frobenius_norm(o - rebuilt);
        if (!(residual < tol.eps() * (1.0 + frobenius_norm(o)))) {
            throw Error(ErrorKind::NoConvergence, "observable " + std::to_string(k + 1) +
                                                      " is not recovered from its joint eigenspaces (residual " +
                                                      std::to_string(residual) + ")");
        }
    }
    return c;
}

inline std::optional<Refinement> inclusion_witness(const Context &c, const Context &d, const Tolerance &tol = {}) {
    return find_refinement(c.system, d.system, tol);
}

/// c <= d: c is a subalgebra of d, i.e. d's system refines c's.
inline bool context_leq(const Context &c, const Context &d, const Tolerance &tol = {}) {
    return inclusion_witness(c, d, tol).has_value();
}

/// Coarse-graining Spec(d) -> Spec(c) for c <= d, as a lookup table.
inline std::vector<std::size_t> restriction_map(const Context &c, const Context &d, const Tolerance &tol = {}) {
    auto r = inclusion_witness(c, d, tol);
    if (!r) throw Error(ErrorKind::NotComparable, c.id + " is not below " + d.id);
    return r->map;
}

/// Largest context contained in both c and d. Spectrum points of c and d
/// are linked when Tr(C_i D_j) exceeds tol.eps; each connected component
/// contributes the sum of its projectors, which is the same operator from
/// either side.
inline Context meet(const Context &c, const Context &d, const Tolerance &tol = {}) {
    if (c.dim() != d.dim()) throw Error(ErrorKind::DimensionMismatch, "contexts of different dimension");
    const std::size_t l = c.spectrum_size(), m = d.spectrum_size();
    std::vector<std::size_t> parent(l + m);
    for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = k;
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (trace(c.system[i] * d.system[j]).real() > tol.eps()) parent[find(i)] = find(l + j);

    std::map<std::size_t, std::size_t> component;
    std::vector<CMatrix> sums;
    for (std::size_t i = 0; i < l; ++i) {
        auto [it, inserted] = component.emplace(find(i), sums.size());
        if (inserted) sums.emplace_back(c.dim());
        sums[it->second] += c.system[i];
    }
    Context out = make_context(validate_system(std::move(sums), tol), tol);
    if (!context_leq(out, c, tol) || !context_leq(out, d, tol)) {
        throw Error(ErrorKind::NotComparable, "meet of " + c.id + " and " + d.id + " is not below both");
    }
    return out;
}

struct OrderPair {
    std::size_t low;
    std::size_t high;
    Refinement refinement;
};

/// Finite poset of contexts containing bottom. Only strict pairs are stored;
/// every context is implicitly below itself with the identity witness.
class ContextPoset {
public:
    ContextPoset() = default;

    /// Builds the order by testing every ordered pair of `contexts`. Inputs
    /// equal as canonical systems are merged (first occurrence kept); bottom
    /// is added first if missing.
    static ContextPoset assemble(std::size_t dim, const std::vector<Context> &contexts, const Tolerance &tol = {}) {
        ContextPoset p;
        p.dim_ = dim;
        p.add_unique(bottom_context(dim, tol), tol);
        for (const Context &c : contexts) p.add_unique(c, tol);
        for (std::size_t a = 0; a < p.contexts_.size(); ++a)
            for (std::size_t b = 0; b < p.contexts_.size(); ++b) {
                if (a == b) continue;
                if (auto r = inclusion_witness(p.contexts_[a], p.contexts_[b], tol)) p.insert_pair(a, b, std::move(*r));
            }
        return p;
    }

    /// Rebuilds a poset from stored parts, checking every witness
    /// (coarsen(high, r) == low) and that bottom is present and minimal.
    static ContextPoset from_parts(std::size_t dim, std::vector<Context> contexts, std::vector<OrderPair> order,
                                   const Tolerance &tol = {}) {
        ContextPoset p;
        p.dim_ = dim;
        p.contexts_ = std::move(contexts);
        for (std::size_t k = 0; k < p.contexts_.size(); ++k) {
            const Context &c = p.contexts_[k];
            if (c.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "context " + c.id + " has wrong dimension");
            if (!approx_equal(canonicalize(c.system, tol), c.system, tol)) {
                throw Error(ErrorKind::TypeMismatch, "context " + c.id + " is not in canonical form");
            }
            if (!p.by_id_.emplace(c.id, k).second) throw Error(ErrorKind::DuplicatePoint, "duplicate context id " + c.id);
        }
        for (auto &pair : order) {
            if (pair.low >= p.contexts_.size() || pair.high >= p.contexts_.size() || pair.low == pair.high) {
                throw Error(ErrorKind::IndexOutOfRange, "order pair refers to an unknown context");
            }
            const Context &lo = p.contexts_[pair.low];
            const Context &hi = p.contexts_[pair.high];
            if (!approx_equal(coarsen(hi.system, pair.refinement, tol), lo.system, tol)) {
                throw Error(ErrorKind::NotComparable, "stored witness does not coarsen " + hi.id + " to " + lo.id);
            }
            p.insert_pair(pair.low, pair.high, std::move(pair.refinement));
        }
        auto bot = p.bottom_index();
        if (!bot) throw Error(ErrorKind::UnknownContext, "poset has no bottom context");
        for (std::size_t k = 0; k < p.contexts_.size(); ++k)
            if (k != *bot && !p.leq(*bot, k)) throw Error(ErrorKind::NotComparable, "bottom is not below " + p.contexts_[k].id);
        return p;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return contexts_.size(); }
    const std::vector<Context> &contexts() const noexcept { return contexts_; }
    const Context &operator[](std::size_t i) const { return contexts_.at(i); }

    /// Strict order pairs sorted by (low, high).
    std::vector<OrderPair> order() const {
        std::vector<OrderPair> out;
        for (const auto &[key, r] : witnesses_) out.push_back({key.first, key.second, r});
        return out;
    }

    std::optional<std::size_t> index_of(const std::string &id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> bottom_index() const {
        for (std::size_t k = 0; k < contexts_.size(); ++k)
            if (is_bottom(contexts_[k])) return k;
        return std::nullopt;
    }

    bool leq(std::size_t low, std::size_t high) const { return low == high || witnesses_.contains({low, high}); }

    /// Witness for low <= high (identity when low == high).
    Refinement witness(std::size_t low, std::size_t high) const {
        if (low == high) return identity_refinement(contexts_.at(low).system.type());
        auto it = witnesses_.find({low, high});
        if (it == witnesses_.end()) {
            throw Error(ErrorKind::NotComparable, contexts_.at(low).id + " is not below " + contexts_.at(high).id);
        }
        return it->second;
    }

    std::vector<std::size_t> restriction(std::size_t low, std::size_t high) const { return witness(low, high).map; }

    /// Contexts strictly below nothing.
    std::vector<std::size_t> maximal() const {
        std::vector<bool> below(contexts_.size(), false);
        for (const auto &[key, r] : witnesses_) below[key.first] = true;
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < contexts_.size(); ++k)
            if (!below[k]) out.push_back(k);
        return out;
    }

    /// Number of strict order pairs touching context k.
    std::size_t neighbour_count(std::size_t k) const {
        std::size_t n = 0;
        for (const auto &[key, r] : witnesses_)
            if (key.first == k || key.second == k) ++n;
        return n;
    }

private:
    std::size_t add_unique(const Context &c, const Tolerance &tol) {
        if (c.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "context " + c.id + " has wrong dimension");
        for (std::size_t k = 0; k < contexts_.size(); ++k)
            if (approx_equal(contexts_[k].system, c.system, tol)) return k;
        contexts_.push_back(c);
        by_id_.emplace(c.id, contexts_.size() - 1);
        return contexts_.size() - 1;
    }

    void insert_pair(std::size_t low, std::size_t high, Refinement r) { witnesses_[{low, high}] = std::move(r); }

    std::size_t dim_ = 0;
    std::vector<Context> contexts_;
    std::map<std::string, std::size_t> by_id_;
    std::map<std::pair<std::size_t, std::size_t>, Refinement> witnesses_;
};

/// Poset of: bottom, the given contexts, and the meet of every pair of
/// them. No further lattice closure is taken.
inline ContextPoset build_poset(std::size_t dim, const std::vector<Context> &generated, const Tolerance &tol = {}) {
    for (const Context &c : generated)
        if (c.dim() != dim) {
            throw Error(ErrorKind::DimensionMismatch, "context " + c.id + " has dimension " + std::to_string(c.dim()));
        }
    std::vector<Context> all = generated;
    for (std::size_t a = 0; a < generated.size(); ++a)
        for (std::size_t b = a + 1; b < generated.size(); ++b) all.push_back(meet(generated[a], generated[b], tol));
    return ContextPoset::assemble(dim, all, tol);
}

/// One context per observable family, closed under pairwise meets as above.
inline ContextPoset build_poset(const std::vector<std::vector<CMatrix>> &families, const Tolerance &tol = {}) {
    if (families.empty() || families.front().empty()) {
        throw Error(ErrorKind::DimensionMismatch, "at least one non-empty observable family is required");
    }
    std::vector<Context> generated;
    generated.reserve(families.size());
    for (const auto &family : families) generated.push_back(generate_context(family, tol));
    return build_poset(families.front().front().n(), generated, tol);
}

}  // namespace ctxq
