#pragma once

// Global sections of the spectral presheaf over a finite context poset: one
// spectrum point per context, compatible with every coarse-graining map.
// Their absence on suitable posets in dimension >= 3 is the Kochen-Specker
// obstruction. Sections here are discrete assignments; whether a section
// would be continuous for the manifold topologies is not modelled.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxq/context.hpp"

namespace ctxq {

struct Section {
    std::map<std::string, std::size_t> assignment;  // context id -> spectrum point (0-based)
};

struct SearchStats {
    std::uint64_t nodes_visited = 0;
    std::size_t branching_contexts = 0;
};

struct SearchResult {
    std::optional<Section> section;
    SearchStats stats;
};

/// True iff every strict pair low <= high satisfies
/// assignment(low) == r(assignment(high)).
inline bool check_section(const ContextPoset &poset, const Section &s) {
    std::vector<std::size_t> a(poset.size());
    for (std::size_t k = 0; k < poset.size(); ++k) {
        auto it = s.assignment.find(poset[k].id);
        if (it == s.assignment.end()) throw Error(ErrorKind::MissingAssignment, "no point for context " + poset[k].id);
        if (it->second >= poset[k].spectrum_size()) return false;
        a[k] = it->second;
    }
    for (const OrderPair &pair : poset.order())
        if (a[pair.low] != pair.refinement.map[a[pair.high]]) return false;
    return true;
}

namespace detail {

// Chronological backtracking over the maximal contexts only. Choosing a
// point of a maximal context forces every context below it through the
// restriction maps; conflicts fail immediately, and forward checking
// rejects a branch once some unassigned maximal context has no point left
// that is consistent with the forced values.
class SectionSearch {
public:
    explicit SectionSearch(const ContextPoset &poset) : poset_(poset), value_(poset.size(), kUnset) {
        branch_ = poset.maximal();
        std::stable_sort(branch_.begin(), branch_.end(), [&](std::size_t x, std::size_t y) {
            return poset.neighbour_count(x) > poset.neighbour_count(y);
        });
        below_.resize(poset.size());
        touching_.resize(poset.size());
        pairs_ = poset.order();
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            below_[pairs_[k].high].push_back(k);
            touching_[pairs_[k].low].push_back(k);
            touching_[pairs_[k].high].push_back(k);
        }
    }

    SearchResult first() {
        mode_ = Mode::First;
        cap_ = 1;
        run(0);
        SearchResult out;
        out.stats = stats();
        out.section = found_;
        return out;
    }

    std::uint64_t count(std::uint64_t cap) {
        mode_ = Mode::Count;
        cap_ = cap;
        if (cap_ > 0) run(0);
        return count_;
    }

    SearchStats stats() const { return SearchStats{nodes_, branch_.size()}; }

private:
    static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    enum class Mode { First, Count };

    bool done() const { return count_ >= cap_; }

    void run(std::size_t depth) {
        if (done()) return;
        if (depth == branch_.size()) {
            ++count_;
            if (mode_ == Mode::First) {
                Section s;
                for (std::size_t k = 0; k < poset_.size(); ++k) s.assignment[poset_[k].id] = value_[k];
                found_ = std::move(s);
            }
            return;
        }
        const std::size_t m = branch_[depth];
        for (std::size_t p = 0; p < poset_[m].spectrum_size() && !done(); ++p) {
            ++nodes_;
            const std::size_t mark = trail_.size();
            if (assign(m, p) && forward_check(depth + 1)) run(depth + 1);
            undo(mark);
        }
    }

    bool set(std::size_t k, std::size_t p) {
        if (value_[k] != kUnset) return value_[k] == p;
        value_[k] = p;
        trail_.push_back(k);
        return true;
    }

    bool assign(std::size_t m, std::size_t p) {
        const std::size_t mark = trail_.size();
        if (!set(m, p)) return false;
        for (std::size_t k : below_[m])
            if (!set(pairs_[k].low, pairs_[k].refinement.map[p])) return false;
        for (std::size_t t = mark; t < trail_.size(); ++t)
            for (std::size_t k : touching_[trail_[t]]) {
                const OrderPair &pair = pairs_[k];
                if (value_[pair.low] != kUnset && value_[pair.high] != kUnset &&
                    value_[pair.low] != pair.refinement.map[value_[pair.high]])
                    return false;
            }
        return true;
    }

    bool forward_check(std::size_t from) const {
        for (std::size_t d = from; d < branch_.size(); ++d) {
            const std::size_t m = branch_[d];
            bool any = false;
            for (std::size_t p = 0; p < poset_[m].spectrum_size() && !any; ++p) {
                bool ok = true;
                for (std::size_t k : below_[m]) {
                    const std::size_t low = pairs_[k].low;
                    if (value_[low] != kUnset && value_[low] != pairs_[k].refinement.map[p]) {
                        ok = false;
                        break;
                    }
                }
                any = ok;
            }
            if (!any) return false;
        }
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            value_[trail_.back()] = kUnset;
            trail_.pop_back();
        }
    }

    const ContextPoset &poset_;
    std::vector<std::size_t> value_;
    std::vector<std::size_t> trail_;
    std::vector<std::size_t> branch_;
    std::vector<OrderPair> pairs_;
    std::vector<std::vector<std::size_t>> below_;     // pair indices with high == k
    std::vector<std::vector<std::size_t>> touching_;  // pair indices with k at either end
    Mode mode_ = Mode::First;
    std::uint64_t cap_ = 1;
    std::uint64_t count_ = 0;
    std::uint64_t nodes_ = 0;
    std::optional<Section> found_;
};

}  // namespace detail

inline SearchResult search_global_section(const ContextPoset &poset) { return detail::SectionSearch(poset).first(); }

inline std::optional<Section> find_global_section(const ContextPoset &poset) {
    return search_global_section(poset).section;
}

/// Number of global sections, exact up to `cap` (the search stops there).
inline std::uint64_t count_global_sections(const ContextPoset &poset, std::uint64_t cap) {
    return detail::SectionSearch(poset).count(cap);
}

}  // namespace ctxq
