#pragma once

// Born valuations between contexts: beta_CD(i, j) = Tr(C_i D_j) on
// Spec(C) x Spec(D), its coherence under coarse-graining, agreement with the
// textbook Born rule, and the probability sections induced by pure states.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxq/context.hpp"
#include "ctxq/linalg.hpp"
#include "ctxq/valuation.hpp"

namespace ctxq {

using SpectrumPoint = std::size_t;
using SpectrumPair = std::pair<SpectrumPoint, SpectrumPoint>;

inline std::vector<SpectrumPoint> spectrum_points(const Context &c) {
    std::vector<SpectrumPoint> pts(c.spectrum_size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = i;
    return pts;
}

inline constexpr double kNegativeClamp = -1e-12;
inline constexpr double kImaginaryResidue = 1e-10;

/// Unnormalized Born valuation of a context pair. Row i, column j holds
/// Tr(C_i D_j); the total mass is n.
class BornTable {
public:
    BornTable(Context left, Context right, FiniteValuation<SpectrumPair> table)
        : left_(std::move(left)), right_(std::move(right)), table_(std::move(table)) {}

    const Context &left() const noexcept { return left_; }
    const Context &right() const noexcept { return right_; }
    const FiniteValuation<SpectrumPair> &table() const noexcept { return table_; }

    std::size_t rows() const noexcept { return left_.spectrum_size(); }
    std::size_t cols() const noexcept { return right_.spectrum_size(); }
    double operator()(std::size_t i, std::size_t j) const { return table_.weights().at(i * cols() + j); }

    std::vector<double> row_marginals() const {
        std::vector<double> m(rows(), 0.0);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) m[i] += (*this)(i, j);
        return m;
    }

    std::vector<double> col_marginals() const {
        std::vector<double> m(cols(), 0.0);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) m[j] += (*this)(i, j);
        return m;
    }

    double total() const { return table_.total_mass(); }

    std::vector<double> row(std::size_t i) const {
        std::vector<double> r(cols());
        for (std::size_t j = 0; j < cols(); ++j) r[j] = (*this)(i, j);
        return r;
    }

private:
    Context left_;
    Context right_;
    FiniteValuation<SpectrumPair> table_;
};

inline BornTable born_table(const Context &c, const Context &d) {
    if (c.dim() != d.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "contexts of dimension " + std::to_string(c.dim()) + " and " +
                                                      std::to_string(d.dim()));
    }
    const double imag_bound = kImaginaryResidue * static_cast<double>(c.dim());
    std::vector<SpectrumPair> pts;
    std::vector<double> ws;
    for (std::size_t i = 0; i < c.spectrum_size(); ++i) {
        for (std::size_t j = 0; j < d.spectrum_size(); ++j) {
            const Complex t = trace(c.system[i] * d.system[j]);
            if (!(std::abs(t.imag()) < imag_bound)) {
                throw Error(ErrorKind::InvalidTable, "Tr(C_" + std::to_string(i + 1) + " D_" + std::to_string(j + 1) +
                                                         ") has imaginary part " + std::to_string(t.imag()));
            }
            if (t.real() < kNegativeClamp) {
                throw Error(ErrorKind::InvalidTable, "Tr(C_" + std::to_string(i + 1) + " D_" + std::to_string(j + 1) +
                                                         ") is negative: " + std::to_string(t.real()));
            }
            pts.emplace_back(i, j);
            ws.push_back(std::max(0.0, t.real()));
        }
    }
    return BornTable(c, d, FiniteValuation<SpectrumPair>(std::move(pts), std::move(ws)));
}

/// Pushes the fine table for (C', D') along r x s and compares it with the
/// coarse table for (C, D), where r: Spec(C') -> Spec(C) and
/// s: Spec(D') -> Spec(D) are the inclusion witnesses.
inline bool coherence_check(const BornTable &fine, const BornTable &coarse, const Refinement &r, const Refinement &s,
                            double tol = 1e-8) {
    if (r.map.size() != fine.rows() || s.map.size() != fine.cols() || r.target.length() != coarse.rows() ||
        s.target.length() != coarse.cols()) {
        throw Error(ErrorKind::NotComparable, "witnesses do not connect the fine and coarse context pairs");
    }
    std::vector<SpectrumPair> target;
    for (std::size_t i = 0; i < coarse.rows(); ++i)
        for (std::size_t j = 0; j < coarse.cols(); ++j) target.emplace_back(i, j);
    const auto pushed = pushforward(
        fine.table(), [&](const SpectrumPair &p) { return SpectrumPair{r.map.at(p.first), s.map.at(p.second)}; },
        std::move(target));
    return approx_equal(pushed, coarse.table(), tol);
}

/// Context-level form: witnesses are recovered by inclusion.
inline bool coherence_check(const Context &fine_left, const Context &fine_right, const Context &coarse_left,
                            const Context &coarse_right, const Tolerance &tol = {}, double table_tol = 1e-8) {
    auto r = inclusion_witness(coarse_left, fine_left, tol);
    auto s = inclusion_witness(coarse_right, fine_right, tol);
    if (!r || !s) throw Error(ErrorKind::NotComparable, "coarse pair is not below the fine pair");
    return coherence_check(born_table(fine_left, fine_right), born_table(coarse_left, coarse_right), *r, *s, table_tol);
}

namespace detail {

// Orthonormal basis of the eigenvalue-1 eigenspace of a projector.
inline std::vector<CVector> range_basis(const CMatrix &p, const Tolerance &tol) {
    const EigenSystem es = hermitian_eigensystem(p, tol);
    std::vector<CVector> basis;
    for (std::size_t k = 0; k < es.values.size(); ++k)
        if (es.values[k] > 0.5) basis.push_back(es.column(k));
    return basis;
}

}  // namespace detail

/// For a rank-one C_i = |psi><psi|, checks Tr(C_i D_j) == <psi|D_j|psi>.
inline bool rank1_check(const Context &c, std::size_t i, const Context &d, const Tolerance &tol = {},
                        double check_tol = 1e-10) {
    if (i >= c.spectrum_size()) throw Error(ErrorKind::IndexOutOfRange, "spectrum point " + std::to_string(i + 1));
    if (c.system.type().parts[i] != 1) {
        throw Error(ErrorKind::RankNotOne, "projector " + std::to_string(i + 1) + " has rank " +
                                               std::to_string(c.system.type().parts[i]));
    }
    const auto basis = detail::range_basis(c.system[i], tol);
    if (basis.size() != 1) throw Error(ErrorKind::RankNotOne, "eigenvalue-1 eigenspace is not one-dimensional");
    const BornTable table = born_table(c, d);
    for (std::size_t j = 0; j < d.spectrum_size(); ++j) {
        const double born = expectation(basis.front(), d.system[j]).real();
        if (!(std::abs(table(i, j) - born) < check_tol)) return false;
    }
    return true;
}

/// Writes C_i = sum_k |psi_k><psi_k| over an orthonormal eigenbasis and
/// checks Tr(C_i D_j) == sum_k <psi_k|D_j|psi_k>.
inline bool rank_k_decomposition_check(const Context &c, std::size_t i, const Context &d, const Tolerance &tol = {},
                                       double check_tol = 1e-9) {
    if (i >= c.spectrum_size()) throw Error(ErrorKind::IndexOutOfRange, "spectrum point " + std::to_string(i + 1));
    const auto basis = detail::range_basis(c.system[i], tol);
    if (basis.size() != c.system.type().parts[i]) return false;
    const BornTable table = born_table(c, d);
    for (std::size_t j = 0; j < d.spectrum_size(); ++j) {
        double sum = 0.0;
        for (const auto &psi : basis) sum += expectation(psi, d.system[j]).real();
        if (!(std::abs(table(i, j) - sum) < check_tol)) return false;
    }
    return true;
}

/// Nonzero state vector; Born weights divide by <psi|psi>.
class PureState {
public:
    explicit PureState(CVector v) : v_(std::move(v)) {
        double norm2 = 0.0;
        for (const auto &z : v_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(ErrorKind::NonFinite, "state entry");
            norm2 += std::norm(z);
        }
        if (!(norm2 > 0.0)) throw Error(ErrorKind::ZeroVector, "pure state must be nonzero");
    }

    const CVector &vector() const noexcept { return v_; }
    std::size_t dim() const noexcept { return v_.size(); }
    double norm_squared() const { return inner(v_, v_).real(); }

private:
    CVector v_;
};

/// i |-> <psi|C_i|psi> / <psi|psi>.
inline ProbabilityValuation<SpectrumPoint> pure_state_section(const PureState &psi, const Context &c) {
    if (psi.dim() != c.dim()) throw Error(ErrorKind::DimensionMismatch, "state and context dimensions differ");
    const double norm2 = psi.norm_squared();
    std::vector<double> ws(c.spectrum_size());
    for (std::size_t i = 0; i < ws.size(); ++i) ws[i] = std::max(0.0, expectation(psi.vector(), c.system[i]).real() / norm2);
    return ProbabilityValuation<SpectrumPoint>(spectrum_points(c), std::move(ws));
}

/// The state's sections over the whole poset commute with every
/// coarse-graining map: pushing the section at D down to C gives the
/// section at C.
inline bool section_compatibility_check(const PureState &psi, const ContextPoset &poset, double tol = 1e-10) {
    std::vector<ProbabilityValuation<SpectrumPoint>> sections;
    sections.reserve(poset.size());
    for (const Context &c : poset.contexts()) sections.push_back(pure_state_section(psi, c));
    for (const OrderPair &pair : poset.order()) {
        const auto &map = pair.refinement.map;
        const auto pushed = pushforward(
            sections[pair.high], [&map](SpectrumPoint p) { return map.at(p); }, spectrum_points(poset[pair.low]));
        if (!approx_equal(pushed, sections[pair.low], tol)) return false;
    }
    return true;
}

/// Distribution of the values of an observable o = sum_i lambda_i C_i in
/// context c, given weights on Spec(c). Eigenvalues closer than
/// tol.eigengap * (1 + ||o||_F) are merged, the merged value being their mean.
inline FiniteValuation<double> observable_distribution(const Context &c, const CMatrix &o,
                                                      const FiniteValuation<SpectrumPoint> &weights,
                                                      const Tolerance &tol = {}) {
    if (o.n() != c.dim()) throw Error(ErrorKind::DimensionMismatch, "observable and context dimensions differ");
    for (SpectrumPoint p : weights.points())
        if (p >= c.spectrum_size()) throw Error(ErrorKind::UnknownPoint, "weight on point outside Spec(c)");
    if (!is_hermitian(o, tol)) throw Error(ErrorKind::NotInContext, "observable is not Hermitian");
    const double norm = frobenius_norm(o);
    CMatrix rebuilt(o.n());
    std::vector<double> lambda(c.spectrum_size());
    for (std::size_t i = 0; i < c.spectrum_size(); ++i) {
        const CMatrix &p = c.system[i];
        if (!(frobenius_norm(commutator(o, p)) < tol.eps() * (1.0 + norm * frobenius_norm(p)))) {
            throw Error(ErrorKind::NotInContext, "observable does not commute with projector " + std::to_string(i + 1));
        }
        lambda[i] = trace(o * p).real() / static_cast<double>(c.system.type().parts[i]);
        rebuilt += p * Complex{lambda[i]};
    }
    if (!(frobenius_norm(o - rebuilt) < tol.eps() * (1.0 + norm))) {
        throw Error(ErrorKind::NotInContext, "observable is not a combination of the context's projectors");
    }

    std::vector<double> sorted = lambda;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> label(c.spectrum_size());
    for (auto [begin, end] : detail::group_sorted(sorted, tol.eigengap() * (1.0 + norm))) {
        double mean = 0.0;
        for (std::size_t k = begin; k < end; ++k) mean += sorted[k];
        mean /= static_cast<double>(end - begin);
        for (std::size_t i = 0; i < lambda.size(); ++i)
            if (lambda[i] >= sorted[begin] && lambda[i] <= sorted[end - 1]) label[i] = mean;
    }
    return pushforward(weights, [&label](SpectrumPoint i) { return label[i]; });
}

}  // namespace ctxq
