#include "flatmod/moduli.hpp"
#include "flatmod/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

using namespace flatmod;
namespace fs = std::filesystem;

namespace {

const fs::path corpus = FLATMOD_CORPUS;

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("flatmod_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Expression, NormalizationFusesPowersInCanonicalOrder) {
    const ModuliExpression e = product({half_line(1), rplus(1), product({rplus(2), circle()})});
    EXPECT_EQ(e.to_string(), "S1 x (R+)^3 x [0,inf)");
    EXPECT_EQ(e.dimension(), 5);
    EXPECT_EQ(product({}).to_string(), "point");
    EXPECT_EQ(product({rplus(1)}).to_string(), "R+");
    EXPECT_EQ(product({rplus(2), rplus(3)}), rplus(5));
}

TEST(Expression, TopologicalFormAndContractibility) {
    const ModuliExpression dq = double_quotient("Gamma(2)", "3-punctured sphere");
    EXPECT_EQ(dq.to_string(), "O(2)\\GL(2,R)/Gamma(2)");
    EXPECT_EQ(topological_form(dq).to_string(), "3-punctured sphere x R+");
    EXPECT_FALSE(dq.contractible());
    EXPECT_EQ(topological_form(double_quotient("Gamma0(2)^t", "cylinder S1xR")).to_string(), "S1 x (R+)^2");
    // plane quotients are contractible
    EXPECT_TRUE(double_quotient("GL2Z", "plane R2").contractible());
    EXPECT_TRUE(product({rplus(2), half_line(1)}).contractible());
    EXPECT_FALSE(orbifold_sector(3, "G[order 3, orbits 3]").contractible());
}

TEST(PermutationGroups, GeneratedOrders) {
    EXPECT_EQ(generate_permutation_group(3, {}).size(), 1u);
    EXPECT_EQ(generate_permutation_group(3, {{1, 0, 2}}).size(), 2u);
    EXPECT_EQ(generate_permutation_group(3, {{1, 0, 2}, {1, 2, 0}}).size(), 6u);
    EXPECT_EQ(generate_permutation_group(4, {{1, 2, 3, 0}}).size(), 4u);
}

TEST(PermutationQuotient, KnownCases) {
    EXPECT_EQ(quotient_rplus_by_perms(3, {}), rplus(3));
    // a transposition folds one coordinate onto a half-line
    EXPECT_EQ(quotient_rplus_by_perms(3, {{1, 0, 2}}), product({rplus(2), half_line(1)}));
    // S3 on three coordinates is a Weyl chamber: R+ x [0,inf)^2
    EXPECT_EQ(quotient_rplus_by_perms(3, {{1, 0, 2}, {1, 2, 0}}), product({rplus(1), half_line(2)}));
    // S3 on three of four coordinates
    EXPECT_EQ(quotient_rplus_by_perms(4, {{1, 0, 2, 3}, {1, 2, 0, 3}}), product({rplus(2), half_line(2)}));
    // a 3-cycle alone has no chamber description
    const ModuliExpression c3 = quotient_rplus_by_perms(3, {{1, 2, 0}});
    EXPECT_EQ(c3.kind, ModuliExpression::Kind::OrbifoldSector);
    EXPECT_EQ(c3.dimension(), 3);
}

// property: every permutation quotient keeps the dimension k
TEST(PermutationQuotient, DimensionIsConserved) {
    const std::vector<std::vector<Permutation>> cases = {
        {}, {{1, 0, 2, 3}}, {{1, 0, 3, 2}}, {{1, 2, 0, 3}}, {{1, 2, 3, 0}}, {{1, 0, 2, 3}, {0, 1, 3, 2}}};
    for (const auto& gens : cases) EXPECT_EQ(quotient_rplus_by_perms(4, gens).dimension(), 4);
}

TEST(ReferenceTable, CoversTheCorpusOnce) {
    const auto& entries = expected_entries();
    EXPECT_EQ(entries.size(), 56u);
    std::set<std::string> names;
    for (const auto& e : entries) {
        EXPECT_TRUE(names.insert(e.name).second) << e.name;
        EXPECT_TRUE(fs::exists(corpus / (e.name + ".json"))) << e.name;
        EXPECT_EQ(e.contractible, e.topological.contractible()) << e.name;
    }
    EXPECT_TRUE(std::is_sorted(entries.begin(), entries.end(),
                               [](const auto& a, const auto& b) { return a.name < b.name; }));
    EXPECT_FALSE(expected_entry("N4_99").has_value());
}

TEST(ReferenceTable, VerificationStatuses) {
    const ExpectedEntry e = *expected_entry("N4_22");
    std::map<std::string, ComputedModuli> computed;
    computed["N4_22"] = {e.expression, false, ""};
    computed["O4_9"] = {rplus(1), false, ""};
    computed["O4_10"] = {{}, false, "NotClosed: bound too small"};
    std::map<std::string, std::string> status;
    for (const auto& r : verify_against_reference(computed)) status[r.name] = r.reference_match;
    EXPECT_EQ(status["N4_22"], "PASS");
    EXPECT_EQ(status["O4_9"], "FAIL");
    EXPECT_EQ(status["O4_10"], "FAIL");
    EXPECT_EQ(status["N4_7"], "ABSENT");
}

// property: a discrete group action keeps the dimension of the Teichmuller space
TEST(Assembly, DimensionMatchesTeichmullerSpace) {
    RunConfiguration cfg;
    cfg.corpus = corpus;
    for (const auto& e : fs::directory_iterator(corpus)) {
        if (e.path().extension() != ".json") continue;
        const Group g = build_group(load_presentation(e.path().string()));
        const int teich = teichmuller_space(isotypic_decomposition(g.holonomy)).dimension();
        const ComputedModuli m = compute_moduli(e.path(), cfg, nullptr);
        EXPECT_EQ(m.expression.dimension(), teich) << g.name() << ": " << m.expression.to_string();
    }
}

TEST(Assembly, ArithmeticCaseMatchesTable) {
    RunConfiguration cfg;
    cfg.corpus = corpus;
    // N4_22 reduces to the double quotient by GL(2,Z), whose quotient surface is a plane
    const ComputedModuli m = compute_moduli(corpus / "N4_22.json", cfg, nullptr);
    EXPECT_TRUE(m.error.empty());
    EXPECT_EQ(m.expression, expected_entry("N4_22")->expression);
}

TEST(Serialization, NormalizerRoundTrip) {
    const Group g = build_group(load_presentation((corpus / "N4_7.json").string()));
    const NormalizerDescription nd = normalizer_matrix_part(g, 1);
    const std::string doc = serialize(nd);
    const NormalizerDescription back = deserialize_normalizer(doc);
    EXPECT_EQ(serialize(back), doc);
    EXPECT_EQ(back.finite_elements, nd.finite_elements);
    ASSERT_TRUE(back.arithmetic_block.has_value());
    EXPECT_EQ(back.arithmetic_block->subgroup.to_string(), nd.arithmetic_block->subgroup.to_string());
    EXPECT_THROW(deserialize_normalizer("{\"group\": 3}"), ParseError);
}

TEST(Cache, HitsAndInvalidation) {
    const fs::path dir = scratch_dir("cache");
    const NormalizerCache cache(dir);
    const Group g = build_group(load_presentation((corpus / "O4_9.json").string()));
    const NormalizerDescription nd = normalizer_matrix_part(g, 1);
    EXPECT_FALSE(cache.get("O4_9", 1, "h1").has_value());
    cache.put("O4_9", 1, "h1", nd);
    const auto hit = cache.get("O4_9", 1, "h1");
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(serialize(*hit), serialize(nd));
    // a changed corpus file or a different bound misses
    EXPECT_FALSE(cache.get("O4_9", 1, "h2").has_value());
    EXPECT_FALSE(cache.get("O4_9", 2, "h1").has_value());
    // a corrupted entry is treated as a miss
    std::ofstream(cache.entry_path("O4_9", 1)) << "{ not json";
    EXPECT_FALSE(cache.get("O4_9", 1, "h1").has_value());
    fs::remove_all(dir);
}

TEST(Report, StructuredOutputIsDeterministic) {
    RunConfiguration cfg;
    cfg.corpus = corpus;
    const auto a = moduli_report(corpus / "O4_9.json", cfg, nullptr);
    const auto b = moduli_report(corpus / "O4_9.json", cfg, nullptr);
    EXPECT_EQ(format_report({a}, OutputFormat::Structured), format_report({b}, OutputFormat::Structured));
    EXPECT_EQ(a.reference_match, "PASS");
    EXPECT_NE(format_report({a}, OutputFormat::Text).find("O4_9"), std::string::npos);
    EXPECT_EQ(parse_format("json"), OutputFormat::Structured);
    EXPECT_THROW(parse_format("xml"), PreconditionViolated);
}
