#include "ctxq/born.hpp"

#include <gtest/gtest.h>

#include "ctxq/fixtures.hpp"
#include "ctxq/qubit.hpp"
#include "test_util.hpp"

using namespace ctxq;
using ctxq::testing::diag;

namespace {

Context ctx(std::vector<CMatrix> family) { return generate_context(family); }

Context random_context(std::size_t n, SeededRng &rng, int lo = 0, int hi = 3) {
    const CMatrix u = random_unitary(n, rng);
    return ctx(commuting_family(u, {random_integer_diagonal(n, rng, lo, hi)}));
}

// Tr(A B) as the double sum of A_kl B_lk, without forming the product.
double trace_of_product(const CMatrix &a, const CMatrix &b) {
    Complex s{};
    for (std::size_t k = 0; k < a.n(); ++k)
        for (std::size_t l = 0; l < a.n(); ++l) s += a(k, l) * b(l, k);
    return s.real();
}

Refinement random_refinement(const OrderedPartition &source, SeededRng &rng) {
    const std::size_t m = 1 + rng.below(source.length());
    Refinement r{std::vector<std::size_t>(source.length()), source, OrderedPartition{std::vector<std::size_t>(m, 0)}};
    for (std::size_t i = 0; i < source.length(); ++i) r.map[i] = i < m ? i : rng.below(m);
    for (std::size_t i = 0; i < source.length(); ++i) r.target.parts[r.map[i]] += source.parts[i];
    return r;
}

}  // namespace

TEST(BornTable, same_context_is_diagonal) {
    const Context c = ctx({diag({1, 2, 2, 3})});
    const BornTable t = born_table(c, c);
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            EXPECT_NEAR(t(i, j), i == j ? static_cast<double>(c.system.type().parts[i]) : 0.0, 1e-14);
}

TEST(BornTable, bottom_pair) {
    const BornTable t = born_table(bottom_context(5), bottom_context(5));
    ASSERT_EQ(t.rows(), 1u);
    ASSERT_EQ(t.cols(), 1u);
    EXPECT_NEAR(t(0, 0), 5.0, 1e-14);
}

TEST(BornTable, orthogonal_bloch_axes_give_one_half) {
    const BornTable t = born_table(qubit_context({1, 0, 0}), qubit_context({0, 0, 1}));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(t(i, j), 0.5, 1e-14);
}

TEST(BornTable, dimension_mismatch) {
    try {
        born_table(bottom_context(2), bottom_context(3));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(BornTable, random_marginals_symmetry_and_bounds) {
    SeededRng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(3);
        const Context c = random_context(n, rng), d = random_context(n, rng);
        const BornTable t = born_table(c, d), swapped = born_table(d, c);
        const auto rows = t.row_marginals(), cols = t.col_marginals();
        for (std::size_t i = 0; i < t.rows(); ++i)
            EXPECT_NEAR(rows[i], static_cast<double>(c.system.type().parts[i]), 1e-9);
        for (std::size_t j = 0; j < t.cols(); ++j)
            EXPECT_NEAR(cols[j], static_cast<double>(d.system.type().parts[j]), 1e-9);
        EXPECT_NEAR(t.total(), static_cast<double>(n), 1e-9);
        for (std::size_t i = 0; i < t.rows(); ++i)
            for (std::size_t j = 0; j < t.cols(); ++j) {
                EXPECT_NEAR(t(i, j), swapped(j, i), 1e-12);
                EXPECT_NEAR(t(i, j), trace_of_product(c.system[i], d.system[j]), 1e-12);
                EXPECT_GE(t(i, j), 0.0);
                const double bound = static_cast<double>(std::min(c.system.type().parts[i], d.system.type().parts[j]));
                EXPECT_LE(t(i, j), bound + 1e-9);
            }
    }
}

TEST(CoherenceCheck, identity_and_bottom_witnesses) {
    SeededRng rng(8);
    const Context c = random_context(3, rng), d = random_context(3, rng);
    const BornTable t = born_table(c, d);
    EXPECT_TRUE(coherence_check(t, t, identity_refinement(c.system.type()), identity_refinement(d.system.type())));

    const Context bot = bottom_context(3);
    const auto r = inclusion_witness(bot, c), s = inclusion_witness(bot, d);
    ASSERT_TRUE(r && s);
    EXPECT_TRUE(coherence_check(t, born_table(bot, bot), *r, *s));
}

TEST(CoherenceCheck, random_coarsenings_in_m4) {
    SeededRng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const Context fl = random_context(4, rng, -2, 2), fr = random_context(4, rng, -2, 2);
        const Context cl = make_context(coarsen(fl.system, random_refinement(fl.system.type(), rng)));
        const Context cr = make_context(coarsen(fr.system, random_refinement(fr.system.type(), rng)));
        EXPECT_TRUE(coherence_check(fl, fr, cl, cr));
    }
}

TEST(CoherenceCheck, detects_wrong_witness) {
    const Context fine = ctx({diag({1, 2, 3})});
    const Context coarse = ctx({diag({1, 1, 3})});
    const auto r = inclusion_witness(coarse, fine);
    ASSERT_TRUE(r);
    Refinement bad = *r;
    std::swap(bad.map[0], bad.map[2]);
    const BornTable ft = born_table(fine, fine), ct = born_table(coarse, coarse);
    EXPECT_TRUE(coherence_check(ft, ct, *r, *r));
    EXPECT_FALSE(coherence_check(ft, ct, bad, *r));
    EXPECT_THROW(coherence_check(ct, ft, *r, *r), Error);
}

TEST(Rank1Check, examples) {
    const Context c = ctx({diag({1, 2, 3})});
    const Context d = ctx({diag({4, 4, 7})});
    const BornTable t = born_table(c, d);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_TRUE(rank1_check(c, i, d));
        for (std::size_t j = 0; j < d.spectrum_size(); ++j) {
            // Row i is the basis vector e_k picked out by C_i; read (D_j)_kk.
            std::size_t k = 0;
            while (c.system[i](k, k).real() < 0.5) ++k;
            EXPECT_NEAR(t(i, j), d.system[j](k, k).real(), 1e-14);
        }
    }
    try {
        rank1_check(d, 0, c);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::RankNotOne);
    }
}

TEST(Rank1Check, qubit_closed_form) {
    SeededRng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const BlochVector a = random_bloch_vector(rng), b = random_bloch_vector(rng);
        const Context ca = qubit_context(a), cb = qubit_context(b);
        EXPECT_TRUE(rank1_check(ca, 0, cb));
        EXPECT_TRUE(rank1_check(ca, 1, cb));
        const BornTable t = born_table(ca, cb);
        const auto closed = qubit_born_closed_form(a, b);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(t(i, j), closed[i][j], 1e-12);
    }
}

TEST(RankKDecomposition, bottom_and_random) {
    SeededRng rng(23);
    const Context d = random_context(4, rng);
    EXPECT_TRUE(rank_k_decomposition_check(bottom_context(4), 0, d));
    for (int trial = 0; trial < 30; ++trial) {
        const CMatrix u = random_unitary(4, rng);
        const Context c = ctx(commuting_family(u, {{5, 5, 1, 2}}));
        ASSERT_EQ(c.system.type().parts[0], 2u);
        const Context other = random_context(4, rng);
        for (std::size_t i = 0; i < c.spectrum_size(); ++i) EXPECT_TRUE(rank_k_decomposition_check(c, i, other));
        EXPECT_TRUE(rank1_check(c, 1, other));
    }
}

TEST(PureStateSection, examples) {
    const Context c = ctx({diag({1, 2, 3})});
    const auto s = pure_state_section(PureState({0.0, Complex{0.0, 2.0}, 0.0}), c);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.weights()[i], std::abs(c.system[i](1, 1)), 1e-14);

    const auto b = pure_state_section(PureState({1.0, 2.0}), bottom_context(2));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_NEAR(b.weights()[0], 1.0, 1e-14);

    const auto x = pure_state_section(PureState({1.0, 0.0}), ctx({pauli_x()}));
    EXPECT_NEAR(x.weights()[0], 0.5, 1e-14);
    EXPECT_NEAR(x.weights()[1], 0.5, 1e-14);

    try {
        PureState({0.0, 0.0});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
    }
}

TEST(PureStateSection, agrees_with_normalized_born_row) {
    SeededRng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(3);
        const Context c = random_context(n, rng);
        const Context d = random_context(n, rng);
        const BornTable t = born_table(c, d);
        for (std::size_t i = 0; i < c.spectrum_size(); ++i) {
            if (c.system.type().parts[i] != 1) continue;
            const auto basis = detail::range_basis(c.system[i], {});
            const auto section = pure_state_section(PureState(basis.front()), d);
            const auto row = t.row(i);
            double mass = 0.0;
            for (double w : row) mass += w;
            for (std::size_t j = 0; j < d.spectrum_size(); ++j) EXPECT_NEAR(row[j] / mass, section.weights()[j], 1e-10);
        }
    }
}

TEST(SectionCompatibility, examples) {
    const PureState psi({1.0, Complex{0.0, 1.0}});
    EXPECT_TRUE(section_compatibility_check(psi, build_poset({{CMatrix::identity(2)}})));
    EXPECT_TRUE(section_compatibility_check(psi, build_poset({{pauli_z()}})));

    SeededRng rng(77);
    const ContextPoset mp = build_poset(mermin_peres_fixture().families);
    for (int trial = 0; trial < 10; ++trial) {
        CVector v(4);
        for (auto &z : v) z = rng.complex_normal();
        EXPECT_TRUE(section_compatibility_check(PureState(v), mp));
    }
}

TEST(ObservableDistribution, examples) {
    const Context z = ctx({pauli_z()});
    // Canonical order of the sigma_z context: find which point carries +1.
    const std::size_t plus = z.system[0](0, 0).real() > 0.5 ? 0 : 1;
    std::vector<double> w(2);
    w[plus] = 0.3;
    w[1 - plus] = 0.7;
    const auto dz = observable_distribution(z, pauli_z(), FiniteValuation<SpectrumPoint>({0, 1}, w));
    EXPECT_NEAR(dz.weight(1.0), 0.3, 1e-14);
    EXPECT_NEAR(dz.weight(-1.0), 0.7, 1e-14);

    const auto di = observable_distribution(z, CMatrix::identity(2), FiniteValuation<SpectrumPoint>({0, 1}, {0.3, 0.7}));
    ASSERT_EQ(di.size(), 1u);
    EXPECT_NEAR(di.weight(1.0), 1.0, 1e-14);

    // A repeated eigenvalue across two spectrum points merges their weights.
    const Context c = ctx({diag({1, 2, 3})});
    const CMatrix o = diag({4, 4, 9});
    const auto d = observable_distribution(c, o, FiniteValuation<SpectrumPoint>({0, 1, 2}, {0.2, 0.3, 0.5}));
    ASSERT_EQ(d.size(), 2u);
    std::size_t nine = 0;
    while (c.system[nine](2, 2).real() < 0.5) ++nine;
    const double w9 = std::vector<double>{0.2, 0.3, 0.5}[nine];
    EXPECT_NEAR(d.weight(9.0), w9, 1e-14);
    EXPECT_NEAR(d.weight(4.0), 1.0 - w9, 1e-14);
}

TEST(ObservableDistribution, errors) {
    const Context z = ctx({pauli_z()});
    const FiniteValuation<SpectrumPoint> w({0, 1}, {0.5, 0.5});
    try {
        observable_distribution(z, pauli_x(), w);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotInContext);
    }
    try {
        observable_distribution(z, pauli_z(), FiniteValuation<SpectrumPoint>({0, 5}, {0.5, 0.5}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownPoint);
    }
}
