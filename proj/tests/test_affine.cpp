#include "flatmod/affine.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace flatmod;
namespace fs = std::filesystem;

namespace {

const fs::path corpus = FLATMOD_CORPUS;

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(corpus))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

AffineMap random_affine(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> e(-2, 2), num(-6, 6), den(1, 4);
    for (;;) {
        QMatrix A(n, n);
        QVector v(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) A(i, j) = Rational(e(rng));
            v(i) = Rational(num(rng), den(rng));
        }
        if (!determinant(A).is_zero()) return make_affine(A, v);
    }
}

// one-dimensional Klein-bottle style group in dimension 2: (diag(1,-1), e1/2)
const char* klein = R"({
  "name": "K2",
  "dimension": 2,
  "translations": [["1", "0"], ["0", "1"]],
  "generators": [{"matrix": [["1", "0"], ["0", "-1"]], "translation": ["1/2", "0"]}]
})";

}  // namespace

TEST(Affine, CompositionIsAssociativeWithIdentityAndInverse) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const AffineMap f = random_affine(rng, 3), g = random_affine(rng, 3), h = random_affine(rng, 3);
        ASSERT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
        ASSERT_EQ(compose(f, identity_map(3)), f);
        ASSERT_EQ(compose(identity_map(3), f), f);
        ASSERT_EQ(compose(f, inverse(f)), identity_map(3));
        ASSERT_EQ(compose(inverse(f), f), identity_map(3));
        ASSERT_EQ(conjugate(f, g), compose(compose(f, g), inverse(f)));
    }
}

TEST(Affine, CompositionConvention) {
    const AffineMap f = make_affine(qmatrix({{0, -1}, {1, 0}}), qvector({1, 0}));
    const AffineMap g = pure_translation(qvector({0, 2}));
    // (A, v)(Id, w) = (A, A w + v)
    EXPECT_EQ(compose(f, g).translation, qvector({-1, 0}));
    EXPECT_THROW(make_affine(qmatrix({{1, 1}, {1, 1}}), qvector({0, 0})), PreconditionViolated);
}

TEST(Holonomy, ClosureOfDihedralGroup) {
    const HolonomyGroup H = holonomy_closure({qmatrix({{0, -1}, {1, 0}}), qmatrix({{1, 0}, {0, -1}})});
    EXPECT_EQ(H.order(), 8u);
    EXPECT_EQ(H.elements[H.identity_index], identity<Rational>(2));
    for (std::size_t i = 0; i < H.order(); ++i)
        for (std::size_t j = 0; j < H.order(); ++j)
            ASSERT_EQ(H.elements[H.table[i][j]], QMatrix(H.elements[i] * H.elements[j]));
    for (std::size_t i = 0; i < H.order(); ++i) {
        QMatrix w = identity<Rational>(2);
        for (std::size_t g : H.words[i]) w = w * H.generators[g];
        ASSERT_EQ(w, H.elements[i]);
    }
    EXPECT_THROW(holonomy_closure({qmatrix({{2, 0}, {0, 1}})}, 16), CapExceeded);
}

TEST(Presentation, ParseAndRoundTrip) {
    const BieberbachPresentation p = parse_presentation(klein);
    EXPECT_EQ(p.name, "K2");
    EXPECT_EQ(p.dimension, 2);
    const BieberbachPresentation q = parse_presentation(to_json(p));
    EXPECT_EQ(q.name, p.name);
    ASSERT_EQ(q.point_generators.size(), 1u);
    EXPECT_EQ(q.point_generators[0], p.point_generators[0]);
    ASSERT_EQ(q.translation_generators.size(), p.translation_generators.size());
}

TEST(Presentation, MalformedDocumentsAreParseErrors) {
    EXPECT_THROW(parse_presentation("{"), ParseError);
    EXPECT_THROW(parse_presentation("[]"), ParseError);
    EXPECT_THROW(parse_presentation(R"({"name": "x", "dimension": 1, "translations": [["1"]], "generators": []})"),
                 ParseError);
    EXPECT_THROW(parse_presentation(R"({"name": "x", "dimension": 1, "translations": [["1"]],
        "generators": [{"matrix": [["-1"]], "translation": [0.5]}]})"),
                 ParseError);
}

TEST(Group, KleinBottleIsTorsionFree) {
    const Group g = build_group(parse_presentation(klein));
    EXPECT_EQ(g.holonomy.order(), 2u);
    EXPECT_TRUE(torsion_free(g));
    EXPECT_TRUE(g.contains(make_affine(qmatrix({{1, 0}, {0, -1}}), qvector({Rational(3, 2), 5}))));
    EXPECT_FALSE(g.contains(make_affine(qmatrix({{1, 0}, {0, -1}}), qvector({0, 0}))));
}

TEST(Group, ReflectionWithoutTranslationHasTorsion) {
    BieberbachPresentation p = parse_presentation(klein);
    p.point_generators[0].translation = qvector({0, 0});
    EXPECT_FALSE(torsion_free_check(p));
}

TEST(Group, GeneratorNotPreservingLatticeIsRejected) {
    BieberbachPresentation p = parse_presentation(klein);
    p.point_generators[0].matrix = qmatrix({{1, 1}, {0, -1}});
    p.point_generators[0].translation = qvector({Rational(1, 2), 0});
    p.translation_generators = {pure_translation(qvector({1, 0})), pure_translation(qvector({Rational(1, 3), 1}))};
    EXPECT_THROW(build_group(p), NotClosed);
}

// property: v_{AB} = A v_B + v_A modulo the lattice, for every pair of holonomy elements
TEST(Group, CanonicalTranslationsFormACocycleOnTheCorpus) {
    for (const auto& f : corpus_files()) {
        const Group g = build_group(load_presentation(f.string()));
        const auto& H = g.holonomy;
        for (std::size_t i = 0; i < H.order(); ++i)
            for (std::size_t j = 0; j < H.order(); ++j) {
                const QVector lhs = g.translations[H.table[i][j]];
                const QVector rhs = H.elements[i] * g.translations[j] + g.translations[i];
                ASSERT_TRUE(g.lattice.contains(QVector(lhs - rhs))) << g.name();
            }
    }
}

TEST(Group, CorpusGroupsAreTorsionFree) {
    const auto files = corpus_files();
    ASSERT_EQ(files.size(), 56u);
    for (const auto& f : files) {
        const Group g = build_group(load_presentation(f.string()));
        EXPECT_TRUE(torsion_free(g)) << g.name();
        EXPECT_EQ(g.dimension(), 4);
    }
}
