#include "ctxq/linalg.hpp"

#include <gtest/gtest.h>

#include "ctxq/fixtures.hpp"
#include "test_util.hpp"

using namespace ctxq;
using ctxq::testing::diag;
using ctxq::testing::dist;
using ctxq::testing::same_matrix_set;

namespace {

const Complex I_{0.0, 1.0};

}  // namespace

TEST(MatMul, identity_and_paulis) {
    EXPECT_EQ(CMatrix::identity(3) * CMatrix::identity(3), CMatrix::identity(3));
    EXPECT_LT(dist(pauli_x() * pauli_x(), CMatrix::identity(2)), 1e-15);
    EXPECT_LT(dist(pauli_x() * pauli_y(), I_ * pauli_z()), 1e-15);
}

TEST(MatMul, dimension_mismatch) {
    try {
        mat_mul(CMatrix::identity(2), CMatrix::identity(3));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(CMatrix, rejects_non_finite_entries) {
    EXPECT_THROW(CMatrix(1, {Complex{std::nan(""), 0.0}}), Error);
    EXPECT_THROW(CMatrix(2, {1.0, 2.0, 3.0}), Error);
}

TEST(Trace, examples) {
    EXPECT_EQ(trace(CMatrix::identity(4)), Complex(4.0));
    EXPECT_EQ(trace(pauli_z()), Complex(0.0));
    const CVector psi{Complex{0.6, 0.0}, Complex{0.0, 0.8}};
    EXPECT_NEAR(trace(CMatrix::outer(psi)).real(), 1.0, 1e-15);
    EXPECT_NEAR(trace(CMatrix::outer(psi)).imag(), 0.0, 1e-15);
}

TEST(IsProjector, examples) {
    EXPECT_TRUE(is_projector(diag({1, 0})));
    EXPECT_FALSE(is_projector(pauli_x()));
    EXPECT_TRUE(is_projector((CMatrix::identity(2) + pauli_z()) * Complex{0.5}));
    EXPECT_FALSE(is_projector(CMatrix{{0.0, 1.0}, {0.0, 0.0}}));
    EXPECT_TRUE(is_hermitian(pauli_y()));
    EXPECT_FALSE(is_hermitian(CMatrix{{0.0, 1.0}, {0.0, 0.0}}));
}

TEST(Eigendecomposition, diagonal_degenerate) {
    const auto sd = hermitian_eigendecomposition(diag({2, 2, 5}));
    ASSERT_EQ(sd.eigenvalues.size(), 2u);
    EXPECT_NEAR(sd.eigenvalues[0], 2.0, 1e-14);
    EXPECT_NEAR(sd.eigenvalues[1], 5.0, 1e-14);
    EXPECT_LT(dist(sd.projectors[0], diag({1, 1, 0})), 1e-14);
    EXPECT_LT(dist(sd.projectors[1], diag({0, 0, 1})), 1e-14);
}

TEST(Eigendecomposition, pauli_z_and_x) {
    auto sd = hermitian_eigendecomposition(pauli_z());
    ASSERT_EQ(sd.eigenvalues.size(), 2u);
    EXPECT_NEAR(sd.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(sd.eigenvalues[1], 1.0, 1e-14);
    EXPECT_LT(dist(sd.projectors[0], diag({0, 1})), 1e-14);
    EXPECT_LT(dist(sd.projectors[1], diag({1, 0})), 1e-14);

    // Hand diagonalization: sigma_x = (+1)(I + X)/2 + (-1)(I - X)/2.
    sd = hermitian_eigendecomposition(pauli_x());
    ASSERT_EQ(sd.eigenvalues.size(), 2u);
    EXPECT_NEAR(sd.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(sd.eigenvalues[1], 1.0, 1e-14);
    EXPECT_LT(dist(sd.projectors[0], (CMatrix::identity(2) - pauli_x()) * Complex{0.5}), 1e-14);
    EXPECT_LT(dist(sd.projectors[1], (CMatrix::identity(2) + pauli_x()) * Complex{0.5}), 1e-14);
}

TEST(Eigendecomposition, rejects_non_hermitian) {
    try {
        hermitian_eigendecomposition(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
    }
}

TEST(Eigendecomposition, random_hermitian_properties) {
    SeededRng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const CMatrix h = random_hermitian(n, rng);
        const double scale = 1.0 + frobenius_norm(h);
        const auto sd = hermitian_eigendecomposition(h);
        EXPECT_LE(dist(h, sd.reconstruct()), 1e-9 * scale);
        CMatrix sum(n);
        for (std::size_t i = 0; i < sd.projectors.size(); ++i) {
            EXPECT_TRUE(is_projector(sd.projectors[i]));
            sum += sd.projectors[i];
            for (std::size_t j = i + 1; j < sd.projectors.size(); ++j)
                EXPECT_LE(frobenius_norm(sd.projectors[i] * sd.projectors[j]), 1e-9);
            if (i > 0) {
                EXPECT_LT(sd.eigenvalues[i - 1], sd.eigenvalues[i]);
            }
        }
        EXPECT_LE(dist(sum, CMatrix::identity(n)), 1e-9);

        // Trace identities are an oracle independent of the rotations.
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
            const double mult = trace(sd.projectors[i]).real();
            s1 += mult * sd.eigenvalues[i];
            s2 += mult * sd.eigenvalues[i] * sd.eigenvalues[i];
        }
        EXPECT_NEAR(s1, trace(h).real(), 1e-10 * scale);
        EXPECT_NEAR(s2, trace(h * h).real(), 1e-9 * scale * scale);

        // Decomposing the reconstruction reproduces the spectrum.
        const auto again = hermitian_eigendecomposition(sd.reconstruct());
        ASSERT_EQ(again.eigenvalues.size(), sd.eigenvalues.size());
        for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
            EXPECT_NEAR(again.eigenvalues[i], sd.eigenvalues[i], 1e-8);
    }
}

TEST(Eigendecomposition, groups_degenerate_random_spectra) {
    SeededRng rng(5);
    const CMatrix u = random_unitary(5, rng);
    const CMatrix h = u * diag({1, 1, 3, 3, 3}) * adjoint(u);
    const auto sd = hermitian_eigendecomposition(h);
    ASSERT_EQ(sd.eigenvalues.size(), 2u);
    EXPECT_NEAR(trace(sd.projectors[0]).real(), 2.0, 1e-12);
    EXPECT_NEAR(trace(sd.projectors[1]).real(), 3.0, 1e-12);
    EXPECT_LE(dist(h, sd.reconstruct()), 1e-9 * (1.0 + frobenius_norm(h)));
}

TEST(SimultaneousDiagonalization, identity_family) {
    const std::vector<CMatrix> fam{CMatrix::identity(3)};
    const auto ps = simultaneous_diagonalization(fam);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_LT(dist(ps[0], CMatrix::identity(3)), 1e-14);
}

TEST(SimultaneousDiagonalization, pauli_z) {
    const std::vector<CMatrix> fam{pauli_z()};
    EXPECT_TRUE(same_matrix_set(simultaneous_diagonalization(fam), {diag({1, 0}), diag({0, 1})}, 1e-14));
}

TEST(SimultaneousDiagonalization, two_qubit_z_pair) {
    const CMatrix i2 = CMatrix::identity(2);
    const std::vector<CMatrix> fam{kron(pauli_z(), i2), kron(i2, pauli_z())};
    const auto ps = simultaneous_diagonalization(fam);
    EXPECT_TRUE(same_matrix_set(
        ps, {diag({1, 0, 0, 0}), diag({0, 1, 0, 0}), diag({0, 0, 1, 0}), diag({0, 0, 0, 1})}, 1e-14));
}

TEST(SimultaneousDiagonalization, errors) {
    const std::vector<CMatrix> noncommuting{pauli_x(), pauli_z()};
    try {
        simultaneous_diagonalization(noncommuting);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
    }
    const std::vector<CMatrix> nonhermitian{CMatrix{{0.0, 1.0}, {0.0, 0.0}}};
    try {
        simultaneous_diagonalization(nonhermitian);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
    }
}

TEST(SimultaneousDiagonalization, random_commuting_families) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        SeededRng pick(seed + 1000);
        const std::size_t n = 2 + pick.below(6);
        const std::size_t l = 1 + pick.below(n);
        const auto fam = random_commuting_family(n, l, seed);
        const auto ps = simultaneous_diagonalization(fam);
        CMatrix sum(n);
        for (const auto &p : ps) {
            EXPECT_TRUE(is_projector(p));
            sum += p;
            for (const auto &a : fam) {
                EXPECT_LE(frobenius_norm(commutator(a, p)), 1e-9);
                const double lambda = trace(a * p).real() / trace(p).real();
                EXPECT_LE(dist(p * a * p, p * Complex{lambda}), 1e-9);
            }
        }
        EXPECT_LE(dist(sum, CMatrix::identity(n)), 1e-9);

        // Coarsest: distinct blocks have distinct joint eigenvalue tuples.
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                bool differ = false;
                for (const auto &a : fam) {
                    const double li = trace(a * ps[i]).real() / trace(ps[i]).real();
                    const double lj = trace(a * ps[j]).real() / trace(ps[j]).real();
                    differ = differ || std::abs(li - lj) > 1e-6;
                }
                EXPECT_TRUE(differ);
            }
    }
}
