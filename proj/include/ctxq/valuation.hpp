#pragma once

// Valuations on finite discrete spaces. Every subset is open, and a
// valuation is fixed by its point weights, so the measure of an open is the
// sum of the weights of its points. This gives the valuation monad
// (dirac / bind) together with pushforward, products and normalization.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ctxq/error.hpp"

namespace ctxq {

template <std::totally_ordered P>
class FiniteValuation {
public:
    using point_type = P;

    FiniteValuation() = default;

    FiniteValuation(std::vector<P> points, std::vector<double> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (points_.size() != weights_.size()) {
            throw Error(ErrorKind::DimensionMismatch, std::to_string(points_.size()) + " points but " +
                                                          std::to_string(weights_.size()) + " weights");
        }
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
                throw Error(ErrorKind::InvalidWeight, "weight " + std::to_string(i + 1) + " is " + std::to_string(weights_[i]));
            }
            if (!index_.emplace(points_[i], i).second) {
                throw Error(ErrorKind::DuplicatePoint, "point listed twice at position " + std::to_string(i + 1));
            }
        }
    }

    const std::vector<P> &points() const noexcept { return points_; }
    const std::vector<double> &weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return points_.size(); }

    std::optional<std::size_t> index_of(const P &x) const {
        auto it = index_.find(x);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const P &x) const { return index_.contains(x); }

    double weight(const P &x) const {
        auto i = index_of(x);
        if (!i) throw Error(ErrorKind::UnknownPoint, "point not in valuation space");
        return weights_[*i];
    }

    double total_mass() const {
        double s = 0.0;
        for (double w : weights_) s += w;
        return s;
    }

private:
    std::vector<P> points_;
    std::vector<double> weights_;
    std::map<P, std::size_t> index_;
};

inline constexpr double kProbabilityMassTolerance = 1e-12;

/// A finite valuation of total mass one.
template <std::totally_ordered P>
class ProbabilityValuation : public FiniteValuation<P> {
public:
    ProbabilityValuation(std::vector<P> points, std::vector<double> weights)
        : FiniteValuation<P>(std::move(points), std::move(weights)) {
        const double mass = this->total_mass();
        if (!(std::abs(mass - 1.0) <= kProbabilityMassTolerance)) {
            throw Error(ErrorKind::NotNormalized, "total mass " + std::to_string(mass));
        }
    }
};

/// Measure of the open `open` (a subset of the points; duplicates ignored).
template <std::totally_ordered P>
double measure(const FiniteValuation<P> &v, std::span<const P> open) {
    std::set<P> seen;
    double s = 0.0;
    for (const P &x : open) {
        if (!seen.insert(x).second) continue;
        s += v.weight(x);
    }
    return s;
}

template <std::totally_ordered P>
double measure(const FiniteValuation<P> &v, const std::vector<P> &open) {
    return measure(v, std::span<const P>(open));
}

template <std::totally_ordered P>
ProbabilityValuation<P> dirac(const P &x, std::vector<P> space) {
    if (std::find(space.begin(), space.end(), x) == space.end()) {
        throw Error(ErrorKind::UnknownPoint, "dirac point not in space");
    }
    std::vector<double> w(space.size(), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i)
        if (space[i] == x) w[i] = 1.0;
    return ProbabilityValuation<P>(std::move(space), std::move(w));
}

/// Image valuation along f; the result lives on the image of f, sorted.
template <std::totally_ordered P, typename F>
    requires std::totally_ordered<std::decay_t<std::invoke_result_t<F &, const P &>>>
auto pushforward(const FiniteValuation<P> &v, F &&f) {
    using Q = std::decay_t<std::invoke_result_t<F &, const P &>>;
    std::map<Q, double> acc;
    for (std::size_t i = 0; i < v.size(); ++i) acc[std::invoke(f, v.points()[i])] += v.weights()[i];
    std::vector<Q> pts;
    std::vector<double> ws;
    for (auto &[q, w] : acc) {
        pts.push_back(q);
        ws.push_back(w);
    }
    return FiniteValuation<Q>(std::move(pts), std::move(ws));
}

/// Image valuation along f onto an explicit target space; points of the
/// target outside the image get weight zero.
template <std::totally_ordered P, typename F, std::totally_ordered Q>
FiniteValuation<Q> pushforward(const FiniteValuation<P> &v, F &&f, std::vector<Q> target) {
    std::vector<double> ws(target.size(), 0.0);
    std::map<Q, std::size_t> index;
    for (std::size_t j = 0; j < target.size(); ++j) index.emplace(target[j], j);
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto it = index.find(std::invoke(f, v.points()[i]));
        if (it == index.end()) throw Error(ErrorKind::UnknownPoint, "pushforward image outside target space");
        ws[it->second] += v.weights()[i];
    }
    return FiniteValuation<Q>(std::move(target), std::move(ws));
}

namespace detail {

struct bind_fn {
    template <std::totally_ordered P, typename K>
    auto operator()(const FiniteValuation<P> &v, K &&k) const {
        using V = std::decay_t<std::invoke_result_t<K &, const P &>>;
        using Q = typename V::point_type;
        std::vector<FiniteValuation<Q>> images;
        images.reserve(v.size());
        for (const P &x : v.points()) images.emplace_back(std::invoke(k, x));
        if (images.empty()) return FiniteValuation<Q>{};

        const auto &space = images.front().points();
        const std::set<Q> space_set(space.begin(), space.end());
        std::vector<double> ws(space.size(), 0.0);
        for (std::size_t i = 0; i < images.size(); ++i) {
            const auto &img = images[i];
            if (std::set<Q>(img.points().begin(), img.points().end()) != space_set) {
                throw Error(ErrorKind::TargetMismatch,
                            "kernel image " + std::to_string(i + 1) + " lives on a different space");
            }
            for (std::size_t j = 0; j < space.size(); ++j) ws[j] += v.weights()[i] * img.weight(space[j]);
        }
        return FiniteValuation<Q>(space, std::move(ws));
    }
};

}  // namespace detail

/// Kleisli extension: weight(y) = sum_x v(x) * k(x)(y). All k(x) must live
/// on the same point set. A function object, so unqualified calls never
/// resolve to std::bind.
inline constexpr detail::bind_fn bind{};

/// Product valuation, weight(x, y) = v(x) * w(y), row-major in (x, y).
template <std::totally_ordered P, std::totally_ordered Q>
FiniteValuation<std::pair<P, Q>> product(const FiniteValuation<P> &v, const FiniteValuation<Q> &w) {
    std::vector<std::pair<P, Q>> pts;
    std::vector<double> ws;
    pts.reserve(v.size() * w.size());
    ws.reserve(v.size() * w.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) {
            pts.emplace_back(v.points()[i], w.points()[j]);
            ws.push_back(v.weights()[i] * w.weights()[j]);
        }
    return FiniteValuation<std::pair<P, Q>>(std::move(pts), std::move(ws));
}

template <std::totally_ordered P>
ProbabilityValuation<P> normalize(const FiniteValuation<P> &v) {
    const double mass = v.total_mass();
    if (!(mass > 0.0)) throw Error(ErrorKind::ZeroMass, "cannot normalize a valuation of mass " + std::to_string(mass));
    std::vector<double> ws(v.weights());
    for (double &w : ws) w /= mass;
    return ProbabilityValuation<P>(v.points(), std::move(ws));
}

/// m(U u V) + m(U n V) == m(U) + m(V) within tol.
template <std::totally_ordered P>
bool modular_check(const FiniteValuation<P> &v, const std::vector<P> &u, const std::vector<P> &w,
                   double tol = 1e-12) {
    std::set<P> su(u.begin(), u.end()), sw(w.begin(), w.end());
    std::vector<P> uni, inter;
    std::set_union(su.begin(), su.end(), sw.begin(), sw.end(), std::back_inserter(uni));
    std::set_intersection(su.begin(), su.end(), sw.begin(), sw.end(), std::back_inserter(inter));
    const double lhs = measure(v, uni) + measure(v, inter);
    const double rhs = measure(v, u) + measure(v, w);
    return std::abs(lhs - rhs) <= tol;
}

/// Equality as measures: agree on every point of either space, with
/// missing points read as weight zero.
template <std::totally_ordered P>
bool approx_equal(const FiniteValuation<P> &a, const FiniteValuation<P> &b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double other = b.contains(a.points()[i]) ? b.weight(a.points()[i]) : 0.0;
        if (!(std::abs(a.weights()[i] - other) <= tol)) return false;
    }
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!a.contains(b.points()[i]) && !(b.weights()[i] <= tol)) return false;
    return true;
}

}  // namespace ctxq
