#pragma once

// Dense complex matrices over C^n, Hermitian eigendecomposition by cyclic
// complex Jacobi rotations, and simultaneous diagonalization of commuting
// Hermitian families. Dimensions here are small (n <= ~16).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxq/error.hpp"

namespace ctxq {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Numerical tolerances shared by every check in the library.
/// `eps` bounds residuals (Frobenius norms); `eigengap` is the relative gap
/// below which eigenvalues are merged into a single eigenspace.
class Tolerance {
public:
    Tolerance() = default;
    Tolerance(double eps, double eigengap) : eps_(eps), eigengap_(eigengap) {
        if (!(eps > 0.0) || !(eigengap > 0.0) || !std::isfinite(eps) || !std::isfinite(eigengap)) {
            throw std::invalid_argument("tolerances must be positive and finite");
        }
    }

    double eps() const noexcept { return eps_; }
    double eigengap() const noexcept { return eigengap_; }

private:
    double eps_ = 1e-9;
    double eigengap_ = 1e-8;
};

/// Square n x n complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), data_(n * n, Complex{0.0, 0.0}) {}

    CMatrix(std::size_t n, std::vector<Complex> entries) : n_(n), data_(std::move(entries)) {
        if (data_.size() != n_ * n_) {
            throw Error(ErrorKind::DimensionMismatch,
                        "expected " + std::to_string(n_ * n_) + " entries, got " + std::to_string(data_.size()));
        }
        for (const auto &z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw Error(ErrorKind::NonFinite, "matrix entry is NaN or infinite");
            }
        }
    }

    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : n_(rows.size()) {
        data_.reserve(n_ * n_);
        for (const auto &row : rows) {
            if (row.size() != n_) throw Error(ErrorKind::DimensionMismatch, "matrix literal is not square");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix diagonal(std::span<const double> d) {
        CMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    /// |psi><psi|
    static CMatrix outer(std::span<const Complex> psi) {
        CMatrix m(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
            for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
        return m;
    }

    std::size_t n() const noexcept { return n_; }
    std::span<const Complex> entries() const noexcept { return data_; }

    Complex &operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Complex &operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    CMatrix &operator+=(const CMatrix &o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    CMatrix &operator-=(const CMatrix &o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    CMatrix &operator*=(Complex s) {
        for (auto &z : data_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix &a, const CMatrix &b);

    bool operator==(const CMatrix &) const = default;

private:
    void check_same(const CMatrix &o) const {
        if (o.n_ != n_) {
            throw Error(ErrorKind::DimensionMismatch, std::to_string(n_) + " vs " + std::to_string(o.n_));
        }
    }

    std::size_t n_ = 0;
    std::vector<Complex> data_;
};

inline CMatrix mat_mul(const CMatrix &a, const CMatrix &b) {
    if (a.n() != b.n()) {
        throw Error(ErrorKind::DimensionMismatch, std::to_string(a.n()) + " vs " + std::to_string(b.n()));
    }
    const std::size_t n = a.n();
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline CMatrix operator*(const CMatrix &a, const CMatrix &b) { return mat_mul(a, b); }

inline Complex trace(const CMatrix &a) {
    Complex t{};
    for (std::size_t i = 0; i < a.n(); ++i) t += a(i, i);
    return t;
}

inline CMatrix adjoint(const CMatrix &a) {
    CMatrix h(a.n());
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j) h(j, i) = std::conj(a(i, j));
    return h;
}

inline double frobenius_norm(const CMatrix &a) {
    double s = 0.0;
    for (const auto &z : a.entries()) s += std::norm(z);
    return std::sqrt(s);
}

inline CMatrix commutator(const CMatrix &a, const CMatrix &b) { return a * b - b * a; }

/// Kronecker product a (x) b.
inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    const std::size_t n = a.n() * b.n();
    CMatrix k(n);
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j)
            for (std::size_t p = 0; p < b.n(); ++p)
                for (std::size_t q = 0; q < b.n(); ++q) k(i * b.n() + p, j * b.n() + q) = a(i, j) * b(p, q);
    return k;
}

inline CVector mat_vec(const CMatrix &a, std::span<const Complex> v) {
    if (v.size() != a.n()) throw Error(ErrorKind::DimensionMismatch, "vector length does not match matrix");
    CVector out(a.n());
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

/// <u|v>, conjugate-linear in the first argument.
inline Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "vector lengths differ");
    Complex s{};
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

/// <psi|A|psi>
inline Complex expectation(std::span<const Complex> psi, const CMatrix &a) { return inner(psi, mat_vec(a, psi)); }

inline bool is_hermitian(const CMatrix &a, const Tolerance &tol = {}) {
    return frobenius_norm(a - adjoint(a)) <= tol.eps();
}

inline bool is_projector(const CMatrix &a, const Tolerance &tol = {}) {
    return is_hermitian(a, tol) && frobenius_norm(a * a - a) < tol.eps();
}

inline CMatrix pauli_x() { return CMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
inline CMatrix pauli_y() { return CMatrix{{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}}; }
inline CMatrix pauli_z() { return CMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

/// Eigenvalues (ascending) with the matching orthonormal eigenvectors as
/// the columns of `vectors`.
struct EigenSystem {
    std::vector<double> values;
    CMatrix vectors;

    CVector column(std::size_t k) const {
        CVector v(vectors.n());
        for (std::size_t i = 0; i < vectors.n(); ++i) v[i] = vectors(i, k);
        return v;
    }
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<CMatrix> projectors;

    CMatrix reconstruct() const {
        CMatrix out(projectors.empty() ? 0 : projectors.front().n());
        for (std::size_t i = 0; i < projectors.size(); ++i) out += projectors[i] * Complex{eigenvalues[i]};
        return out;
    }
};

namespace detail {

inline constexpr int kMaxJacobiSweeps = 100;
inline constexpr double kJacobiOffDiagonalTarget = 1e-12;

inline double off_diagonal_norm(const CMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = 0; j < a.n(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Cyclic Jacobi on a matrix already known to be Hermitian. Each rotation is
// J = diag(1, conj(e)) * [[c, s], [-s, c]] on the (p, q) plane, where
// e = a_pq / |a_pq| removes the phase and (c, s) is the real Jacobi rotation.
inline EigenSystem jacobi(const CMatrix &h) {
    const std::size_t n = h.n();
    CMatrix a = (h + adjoint(h)) * Complex{0.5};
    CMatrix v = CMatrix::identity(n);
    const double target = kJacobiOffDiagonalTarget * (1.0 + frobenius_norm(h));

    bool converged = false;
    for (int sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
        if (off_diagonal_norm(a) < target) {
            converged = true;
            break;
        }
        if (sweep == kMaxJacobiSweeps) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex g = a(p, q);
                const double ag = std::abs(g);
                if (ag == 0.0) continue;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * ag);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex e = g / ag;
                const Complex j_pp = c, j_pq = s, j_qp = -s * std::conj(e), j_qq = c * std::conj(e);

                for (std::size_t k = 0; k < n; ++k) {  // a <- a J
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * j_pp + akq * j_qp;
                    a(k, q) = akp * j_pq + akq * j_qq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // a <- J^H a
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(j_pp) * apk + std::conj(j_qp) * aqk;
                    a(q, k) = std::conj(j_pq) * apk + std::conj(j_qq) * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {  // v <- v J
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * j_pp + vkq * j_qp;
                    v(k, q) = vkp * j_pq + vkq * j_qq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (!converged) {
        throw Error(ErrorKind::NoConvergence,
                    "Jacobi sweep budget of " + std::to_string(kMaxJacobiSweeps) + " exhausted");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    EigenSystem out{std::vector<double>(n), CMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

// Splits ascending values into runs whose consecutive gaps are <= gap.
inline std::vector<std::pair<std::size_t, std::size_t>> group_sorted(std::span<const double> values, double gap) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t begin = 0;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        if (k == values.size() || values[k] - values[k - 1] > gap) {
            if (k > begin) runs.emplace_back(begin, k);
            begin = k;
        }
    }
    return runs;
}

inline void require_hermitian(const CMatrix &h, const Tolerance &tol, const std::string &what) {
    if (!is_hermitian(h, tol)) {
        throw Error(ErrorKind::NotHermitian,
                    what + " has ||A - A^H||_F = " + std::to_string(frobenius_norm(h - adjoint(h))));
    }
}

}  // namespace detail

/// Full eigensystem of a Hermitian matrix (no eigenvalue grouping).
inline EigenSystem hermitian_eigensystem(const CMatrix &h, const Tolerance &tol = {}) {
    detail::require_hermitian(h, tol, "matrix");
    return detail::jacobi(h);
}

/// Spectral decomposition h = sum_i lambda_i P_i with distinct eigenvalues.
/// Eigenvalues within tol.eigengap * (1 + ||h||_F) of their neighbour share
/// one eigenspace projector; the merged eigenvalue is the run's mean.
inline SpectralDecomposition hermitian_eigendecomposition(const CMatrix &h, const Tolerance &tol = {}) {
    const EigenSystem es = hermitian_eigensystem(h, tol);
    const std::size_t n = h.n();
    const double gap = tol.eigengap() * (1.0 + frobenius_norm(h));

    SpectralDecomposition out;
    for (auto [begin, end] : detail::group_sorted(es.values, gap)) {
        CMatrix p(n);
        double sum = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            p += CMatrix::outer(es.column(k));
            sum += es.values[k];
        }
        out.eigenvalues.push_back(sum / static_cast<double>(end - begin));
        out.projectors.push_back(std::move(p));
    }
    return out;
}

/// Coarsest complete orthogonal list of projectors onto the joint
/// eigenspaces of a commuting Hermitian family.
///
/// Deterministic iterative refinement: starting from the whole space, each
/// member is compressed onto every current block (V^H A V in an orthonormal
/// basis V of the block), diagonalized there, and the block split along the
/// resulting eigenspaces.
inline std::vector<CMatrix> simultaneous_diagonalization(std::span<const CMatrix> family,
                                                         const Tolerance &tol = {}) {
    if (family.empty()) throw Error(ErrorKind::DimensionMismatch, "empty observable family");
    const std::size_t n = family.front().n();
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (family[i].n() != n) {
            throw Error(ErrorKind::DimensionMismatch, "observable " + std::to_string(i + 1) + " has dimension " +
                                                          std::to_string(family[i].n()) + ", expected " +
                                                          std::to_string(n));
        }
        detail::require_hermitian(family[i], tol, "observable " + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double bound = tol.eps() * (1.0 + frobenius_norm(family[i]) * frobenius_norm(family[j]));
            const double c = frobenius_norm(commutator(family[i], family[j]));
            if (!(c < bound)) {
                throw Error(ErrorKind::NotCommuting, "observables " + std::to_string(i + 1) + " and " +
                                                         std::to_string(j + 1) + " have ||[A,B]||_F = " +
                                                         std::to_string(c));
            }
        }
    }

    // Each block is an orthonormal basis of a joint eigenspace.
    using Basis = std::vector<CVector>;
    std::vector<Basis> blocks(1);
    for (std::size_t i = 0; i < n; ++i) {
        CVector e(n);
        e[i] = 1.0;
        blocks[0].push_back(std::move(e));
    }

    for (const CMatrix &a : family) {
        const double gap = tol.eigengap() * (1.0 + frobenius_norm(a));
        std::vector<Basis> next;
        for (const Basis &basis : blocks) {
            const std::size_t k = basis.size();
            std::vector<CVector> image;
            image.reserve(k);
            for (const auto &v : basis) image.push_back(mat_vec(a, v));
            CMatrix compressed(k);
            for (std::size_t x = 0; x < k; ++x)
                for (std::size_t y = 0; y < k; ++y) compressed(x, y) = inner(basis[x], image[y]);
            const EigenSystem es = detail::jacobi(compressed);
            for (auto [begin, end] : detail::group_sorted(es.values, gap)) {
                Basis sub;
                for (std::size_t col = begin; col < end; ++col) {
                    CVector w(n);
                    for (std::size_t x = 0; x < k; ++x) {
                        const Complex coeff = es.vectors(x, col);
                        for (std::size_t r = 0; r < n; ++r) w[r] += coeff * basis[x][r];
                    }
                    sub.push_back(std::move(w));
                }
                next.push_back(std::move(sub));
            }
        }
        blocks = std::move(next);
    }

    std::vector<CMatrix> projectors;
    projectors.reserve(blocks.size());
    for (const Basis &basis : blocks) {
        CMatrix p(n);
        for (const auto &v : basis) p += CMatrix::outer(v);
        projectors.push_back(std::move(p));
    }
    return projectors;
}

}  // namespace ctxq
