#include "flatmod/exact_core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flatmod;

namespace {

ZMatrix random_integer_matrix(std::mt19937& rng, int r, int c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    ZMatrix M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = Integer(d(rng));
    return M;
}

bool unimodular(const ZMatrix& U) {
    const Rational d = determinant(to_rational(U));
    return d == Rational(1) || d == Rational(-1);
}

}  // namespace

TEST(Rational, ParseAndPrint) {
    EXPECT_EQ(Rational::parse("-6/4"), Rational(-3, 2));
    EXPECT_EQ(Rational::parse("7").str(), "7");
    EXPECT_EQ(Rational(3, -6).str(), "-1/2");
    EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("x"), std::invalid_argument);
}

TEST(Rational, FractionalPartIsInUnitInterval) {
    EXPECT_EQ(Rational(-1, 4).frac(), Rational(3, 4));
    EXPECT_EQ(Rational(9, 4).frac(), Rational(1, 4));
    EXPECT_EQ(Rational(-2).frac(), Rational(0));
}

TEST(Integer, FloorDivisionAndModulus) {
    EXPECT_EQ(floor_div(Integer(-7), Integer(2)), Integer(-4));
    EXPECT_EQ(floor_mod(Integer(-7), Integer(2)), Integer(1));
    EXPECT_EQ(gcd(Integer(-12), Integer(18)), Integer(6));
    EXPECT_EQ(lcm(Integer(4), Integer(6)), Integer(12));
}

TEST(Matrix, DeterminantRankInverse) {
    const QMatrix A = qmatrix({{2, 1}, {Rational(1, 2), 3}});
    EXPECT_EQ(determinant(A), Rational(11, 2));
    EXPECT_EQ(rank(A), 2);
    EXPECT_EQ(A * inverse(A), identity<Rational>(2));
    EXPECT_EQ(rank(qmatrix({{1, 2}, {2, 4}})), 1);
    EXPECT_THROW(inverse(qmatrix({{1, 2}, {2, 4}})), PreconditionViolated);
}

TEST(SmithNormalForm, FixedExample) {
    ZMatrix M(3, 3);
    M << Integer(2), Integer(4), Integer(4), Integer(-6), Integer(6), Integer(12), Integer(10), Integer(-4),
        Integer(-16);
    const SnfResult s = smith_normal_form(M);
    EXPECT_EQ(s.U * M * s.V, s.D);
    EXPECT_EQ(s.D(0, 0), Integer(2));
    EXPECT_EQ(s.D(1, 1), Integer(6));
    EXPECT_EQ(s.D(2, 2), Integer(12));
}

// property: U M V = D, U and V unimodular, D diagonal, nonnegative, with the divisibility chain
TEST(SmithNormalForm, RandomMatricesSatisfyDefinition) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dim(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const int r = dim(rng), c = dim(rng);
        const ZMatrix M = random_integer_matrix(rng, r, c, -20, 20);
        const SnfResult s = smith_normal_form(M);
        ASSERT_EQ(s.U * M * s.V, s.D);
        ASSERT_TRUE(unimodular(s.U));
        ASSERT_TRUE(unimodular(s.V));
        const int k = std::min(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                if (i != j) ASSERT_TRUE(s.D(i, j).is_zero());
        for (int i = 0; i < k; ++i) ASSERT_GE(s.D(i, i), Integer(0));
        for (int i = 0; i + 1 < k; ++i) {
            if (s.D(i, i).is_zero()) {
                ASSERT_TRUE(s.D(i + 1, i + 1).is_zero());
            } else {
                ASSERT_TRUE((s.D(i + 1, i + 1) % s.D(i, i)).is_zero());
            }
        }
    }
}

// large entries must not make the transforms explode
TEST(SmithNormalForm, LargeEntriesStayTractable) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ZMatrix M = random_integer_matrix(rng, 6, 6, -1000000, 1000000);
        const SnfResult s = smith_normal_form(M);
        ASSERT_EQ(s.U * M * s.V, s.D);
        for (Eigen::Index i = 0; i < s.U.rows(); ++i)
            for (Eigen::Index j = 0; j < s.U.cols(); ++j) ASSERT_LT(s.U(i, j).str().size(), 400u);
    }
}

TEST(HermiteNormalForm, ReducedEchelon) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const ZMatrix M = random_integer_matrix(rng, 4, 3, -9, 9);
        const ZMatrix H = hermite_normal_form(M);
        Eigen::Index last = -1;
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            Eigen::Index p = 0;
            while (H(i, p).is_zero()) ++p;
            ASSERT_GT(p, last);
            ASSERT_GT(H(i, p), Integer(0));
            for (Eigen::Index k = 0; k < i; ++k) {
                ASSERT_GE(H(k, p), Integer(0));
                ASSERT_LT(H(k, p), H(i, p));
            }
            last = p;
        }
        // same row lattice: every row of M is an integer combination of the rows of H and conversely
        const QMatrix Ht = to_rational(H).transpose(), Mt = to_rational(M).transpose();
        for (Eigen::Index i = 0; i < M.rows(); ++i) ASSERT_TRUE(integer_solvable(Ht, Mt.col(i)));
        for (Eigen::Index i = 0; i < H.rows(); ++i) ASSERT_TRUE(integer_solvable(Mt, Ht.col(i)));
    }
}

TEST(Lattice, EqualLatticesCompareEqual) {
    const Lattice a = hnf_lattice({qvector({1, 0}), qvector({Rational(1, 2), Rational(1, 2)})});
    const Lattice b = hnf_lattice({qvector({Rational(1, 2), Rational(-1, 2)}), qvector({0, 1}),
                                   qvector({Rational(3, 2), Rational(1, 2)})});
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.contains(qvector({Rational(1, 2), Rational(-1, 2)})));
    EXPECT_FALSE(a.contains(qvector({Rational(1, 2), 0})));
    EXPECT_THROW(hnf_lattice({qvector({1, 1}), qvector({2, 2})}), RankDeficient);
}

TEST(Lattice, ReduceGivesRepresentativeInFundamentalCell) {
    const Lattice L = hnf_lattice({qvector({2, 0}), qvector({1, 3})});
    const QVector v = qvector({Rational(17, 3), Rational(-5, 2)});
    const QVector r = L.reduce(v);
    EXPECT_TRUE(L.contains(QVector(v - r)));
    const QVector c = L.coordinates(r);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        EXPECT_GE(c(i), Rational(0));
        EXPECT_LT(c(i), Rational(1));
    }
}

TEST(SolveMod, KnownSolvableAndUnsolvable) {
    // 2 x = 1/2 mod Z has x = 1/4
    auto x = solve_mod_integers(qmatrix({{2}}), qvector({Rational(1, 2)}));
    ASSERT_TRUE(x.has_value());
    EXPECT_TRUE((Rational(2) * (*x)(0) - Rational(1, 2)).is_integer());
    // 0 x = 1/2 mod Z has no solution
    EXPECT_FALSE(solve_mod_integers(qmatrix({{0}}), qvector({Rational(1, 2)})).has_value());
    // stacked system x = 0 and x = 1/2 mod Z has none either
    EXPECT_FALSE(solve_mod_integers(qmatrix({{1}, {1}}), qvector({0, Rational(1, 2)})).has_value());
}

// property: solve_mod_lattice agrees with exhaustive search on a finite grid of candidate solutions
TEST(SolveMod, AgreesWithGridSearch) {
    std::mt19937 rng(19);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int checked = 0;
    while (checked < 300) {
        const int n = uni(1, 2);
        QMatrix B(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B(i, j) = i == j ? Rational(uni(1, 3), uni(1, 6)) : Rational(uni(-1, 1), uni(1, 3));
        if (determinant(B).is_zero()) continue;
        std::vector<QVector> cols;
        for (int j = 0; j < n; ++j) cols.push_back(B.col(j));
        const Lattice L = hnf_lattice(cols);
        QMatrix M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = Rational(uni(-2, 2));
        QVector c(n);
        for (int i = 0; i < n; ++i) c(i) = Rational(uni(0, 5), uni(1, 6));
        // a solvable system has a solution with denominator dividing den(c) * d, where d is the gcd of the
        // maximal nonzero minors of M
        Integer d(1);
        if (rank(M) == n) {
            d = abs(determinant(M).numerator());
        } else if (rank(M) == 1) {
            d = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d = gcd(d, M(i, j).numerator());
        }
        Integer denc(1);
        for (int i = 0; i < n; ++i) denc = lcm(denc, c(i).denominator());
        const std::int64_t N = (denc * d).to_ll();
        std::int64_t points = 1;
        for (int i = 0; i < n; ++i) points *= N;
        if (points > 300000) continue;
        ++checked;
        bool brute = false;
        std::vector<int> k(static_cast<std::size_t>(n), 0);
        // y = k / N solves M y = c mod Z iff M k = N c mod N
        std::vector<std::int64_t> Mi, Nc;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) Mi.push_back(M(i, j).numerator().to_ll());
            Nc.push_back((c(i) * Rational(N)).numerator().to_ll());
        }
        for (std::int64_t idx = 0; idx < points && !brute; ++idx) {
            std::vector<std::int64_t> k;
            for (std::int64_t t = idx, i = 0; i < n; ++i, t /= N) k.push_back(t % N);
            bool all = true;
            for (int i = 0; i < n && all; ++i) {
                std::int64_t r = -Nc[static_cast<std::size_t>(i)];
                for (int j = 0; j < n; ++j) r += Mi[static_cast<std::size_t>(i * n + j)] * k[static_cast<std::size_t>(j)];
                all = r % N == 0;
            }
            brute = all;
        }
        const QMatrix A = L.basis() * M * L.basis_inverse();
        const QVector w = L.basis() * c;
        const auto x = solve_mod_lattice(A, w, L);
        ASSERT_EQ(brute, x.has_value()) << to_string(M) << " " << to_string(c);
        if (x) ASSERT_TRUE(L.contains(QVector(A * *x - w)));
    }
}

TEST(IntegerSolvable, Basic) {
    EXPECT_TRUE(integer_solvable(qmatrix({{2, 0}, {0, 3}}), qvector({4, 9})));
    EXPECT_FALSE(integer_solvable(qmatrix({{2, 0}, {0, 3}}), qvector({4, 8})));
    EXPECT_TRUE(integer_solvable(qmatrix({{2, 3}}), qvector({1})));
}
