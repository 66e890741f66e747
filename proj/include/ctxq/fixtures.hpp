#pragma once

// Seeded fixture generators: random commuting families, random posets with
// shared eigenvectors, random qubit contexts, and the Mermin-Peres square in
// M_4 together with its sign-assignment oracle.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ctxq/linalg.hpp"
#include "ctxq/qubit.hpp"

namespace ctxq {

/// mt19937_64 plus portable uniform/normal transforms, so a seed gives the
/// same stream with every standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    double normal() {
        if (cached_) {
            const double z = *cached_;
            cached_.reset();
            return z;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> cached_;
};

/// Columns are Gram-Schmidt orthonormalized complex Gaussian vectors.
inline CMatrix random_unitary(std::size_t n, SeededRng &rng) {
    std::vector<CVector> cols;
    while (cols.size() < n) {
        CVector v(n);
        for (auto &z : v) z = rng.complex_normal();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &u : cols) {
                const Complex c = inner(u, v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
            }
        const double norm = std::sqrt(inner(v, v).real());
        if (norm < 1e-6) continue;
        for (auto &z : v) z /= norm;
        cols.push_back(std::move(v));
    }
    CMatrix u(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
    return u;
}

inline CMatrix random_hermitian(std::size_t n, SeededRng &rng) {
    CMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
    return (x + adjoint(x)) * Complex{0.5};
}

/// U diag(d) U^H for each diagonal d.
inline std::vector<CMatrix> commuting_family(const CMatrix &u, const std::vector<std::vector<double>> &diagonals) {
    std::vector<CMatrix> out;
    const CMatrix uh = adjoint(u);
    for (const auto &d : diagonals) {
        if (d.size() != u.n()) throw Error(ErrorKind::DimensionMismatch, "diagonal length differs from dimension");
        out.push_back(u * CMatrix::diagonal(d) * uh);
    }
    return out;
}

inline std::vector<double> random_integer_diagonal(std::size_t n, SeededRng &rng, int lo, int hi) {
    std::vector<double> d(n);
    for (auto &x : d) x = static_cast<double>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
    return d;
}

/// l real-diagonal matrices with entries in {-2..2}, conjugated by one
/// seeded random unitary.
inline std::vector<CMatrix> random_commuting_family(std::size_t n, std::size_t l, std::uint64_t seed) {
    if (n == 0 || l == 0 || l > n) throw Error(ErrorKind::IndexOutOfRange, "need 1 <= l <= n");
    SeededRng rng(seed);
    const CMatrix u = random_unitary(n, rng);
    std::vector<std::vector<double>> diags;
    for (std::size_t k = 0; k < l; ++k) diags.push_back(random_integer_diagonal(n, rng, -2, 2));
    return commuting_family(u, diags);
}

struct FixtureExpectation {
    std::optional<bool> section_exists;
    std::optional<std::size_t> contexts;
};

struct Fixture {
    std::string name;
    std::size_t dim = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::vector<CMatrix>> families;
    FixtureExpectation expected;
};

/// The nine two-qubit Pauli products of the Mermin-Peres square, row-major:
///   X1  X2  X1X2
///   Z2  Z1  Z1Z2
///   X1Z2 Z1X2 Y1Y2
inline std::array<CMatrix, 9> mermin_peres_observables() {
    const CMatrix i2 = CMatrix::identity(2), x = pauli_x(), y = pauli_y(), z = pauli_z();
    return {kron(x, i2), kron(i2, x), kron(x, x),  //
            kron(i2, z), kron(z, i2), kron(z, z),  //
            kron(x, z),  kron(z, x),  kron(y, y)};
}

/// Observable indices of the three rows followed by the three columns.
inline constexpr std::array<std::array<std::size_t, 3>, 6> kMerminPeresLines{{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  //
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},
}};

inline Fixture mermin_peres_fixture() {
    const auto obs = mermin_peres_observables();
    Fixture f{"mermin-peres", 4, std::nullopt, {}, {false, 16}};
    for (const auto &line : kMerminPeresLines) f.families.push_back({obs[line[0]], obs[line[1]], obs[line[2]]});
    return f;
}

/// Sign s with A B C = s I for each line, or nothing if the product is not
/// +-I within tol.
inline std::optional<std::array<int, 6>> mermin_peres_line_signs(const std::array<CMatrix, 9> &obs, double tol = 1e-12) {
    std::array<int, 6> signs{};
    const CMatrix id = CMatrix::identity(4);
    for (std::size_t k = 0; k < 6; ++k) {
        const auto &line = kMerminPeresLines[k];
        const CMatrix prod = obs[line[0]] * obs[line[1]] * obs[line[2]];
        if (frobenius_norm(prod - id) < tol) {
            signs[k] = 1;
        } else if (frobenius_norm(prod + id) < tol) {
            signs[k] = -1;
        } else {
            return std::nullopt;
        }
    }
    return signs;
}

/// Number of +-1 value assignments to the nine observables whose product
/// along each line equals that line's operator sign. Zero means no
/// noncontextual value assignment exists.
inline std::size_t count_sign_assignments(const std::array<int, 6> &line_signs) {
    std::size_t count = 0;
    for (unsigned mask = 0; mask < (1u << 9); ++mask) {
        bool ok = true;
        for (std::size_t k = 0; k < 6 && ok; ++k) {
            int prod = 1;
            for (std::size_t idx : kMerminPeresLines[k]) prod *= (mask >> idx) & 1u ? -1 : 1;
            ok = prod == line_signs[k];
        }
        if (ok) ++count;
    }
    return count;
}

inline BlochVector random_bloch_vector(SeededRng &rng) {
    for (;;) {
        const double x = rng.normal(), y = rng.normal(), z = rng.normal();
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (norm < 1e-6) continue;
        return BlochVector::normalized(x / norm, y / norm, z / norm);
    }
}

/// One single-observable family a.sigma per Bloch vector.
inline Fixture bloch_poset_fixture(const std::vector<BlochVector> &axes, std::string name = "bloch") {
    Fixture f{std::move(name), 2, std::nullopt, {}, {true, axes.size() + 1}};
    for (const auto &a : axes) f.families.push_back({bloch_unitary(a)});
    return f;
}

inline Fixture random_bloch_poset(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorKind::IndexOutOfRange, "count must be positive");
    SeededRng rng(seed);
    std::vector<BlochVector> axes;
    for (std::size_t k = 0; k < count; ++k) axes.push_back(random_bloch_vector(rng));
    Fixture f = bloch_poset_fixture(axes, "bloch-" + std::to_string(count) + "-seed-" + std::to_string(seed));
    f.seed = seed;
    return f;
}

/// `count` commuting families in M_n whose eigenbases overlap: each new
/// basis is either fresh or an earlier one with a random unitary mixing a
/// random block of its columns, so pairwise meets are often nontrivial.
/// Diagonals are integers in {0, 1, 2}, so families range from the full
/// basis down to coarse partitions.
inline Fixture random_overlap_fixture(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n < 2 || count == 0) throw Error(ErrorKind::IndexOutOfRange, "need n >= 2 and count >= 1");
    SeededRng rng(seed);
    std::vector<CMatrix> bases;
    Fixture f{"overlap-n" + std::to_string(n) + "-k" + std::to_string(count) + "-seed-" + std::to_string(seed), n, seed,
              {}, {}};
    for (std::size_t k = 0; k < count; ++k) {
        CMatrix u(n);
        if (bases.empty() || rng.below(4) == 0) {
            u = random_unitary(n, rng);
        } else {
            const CMatrix &base = bases[rng.below(bases.size())];
            const std::size_t block = 2 + rng.below(n - 1);  // 2..n columns mixed
            const std::size_t start = rng.below(n - block + 1);
            const CMatrix v = random_unitary(block, rng);
            CMatrix mix = CMatrix::identity(n);
            for (std::size_t i = 0; i < block; ++i)
                for (std::size_t j = 0; j < block; ++j) mix(start + i, start + j) = v(i, j);
            u = base * mix;
        }
        bases.push_back(u);
        f.families.push_back(commuting_family(u, {random_integer_diagonal(n, rng, 0, 2)}));
    }
    return f;
}

}  // namespace ctxq
