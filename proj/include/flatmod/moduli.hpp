#pragma once

#include "flatmod/isotypic.hpp"
#include "flatmod/normalizer.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flatmod {

struct ModuliExpression {
    // declaration order is the canonical order of product factors
    enum class Kind { Circle, Surface, DoubleQuotient, Attached, OrbifoldSector, RPlusPower, HalfLinePower, Product };

    Kind kind = Kind::Product;
    int power = 0;       // RPlusPower, HalfLinePower, OrbifoldSector
    std::string label;   // subgroup, surface or group descriptor
    std::string detail;  // underlying surface of a double quotient or attached space; family of f_t
    std::vector<ModuliExpression> children;

    std::string to_string() const;
    int dimension() const;
    bool contractible() const;  // after topological expansion
    friend bool operator==(const ModuliExpression& a, const ModuliExpression& b) {
        return a.to_string() == b.to_string();
    }
};

ModuliExpression rplus(int k);
ModuliExpression half_line(int m);
ModuliExpression circle();
ModuliExpression surface(const std::string& name);
// O(2)\GL(2,R)/Gamma, with the underlying surface of H^2/Gamma^+
ModuliExpression double_quotient(const std::string& subgroup, const std::string& surface_name);
// X1 u_{f_t} X2 with X1 = X2 = H^2/Gamma^+
ModuliExpression attached(const std::string& quotient, const std::string& surface_name, const std::string& family);
ModuliExpression orbifold_sector(int k, const std::string& group);
ModuliExpression product(std::vector<ModuliExpression> factors);

// sorted, fused, flattened
ModuliExpression normalize(ModuliExpression e);
// double quotients and named surfaces replaced by their homeomorphism types
ModuliExpression topological_form(const ModuliExpression& e);

using Permutation = std::vector<int>;
std::vector<Permutation> generate_permutation_group(int k, const std::vector<Permutation>& generators);
ModuliExpression quotient_rplus_by_perms(int k, const std::vector<Permutation>& generators);

ModuliExpression reduce_ctype_factor(const NormalizerDescription& nd, const IsotypicDecomposition& d);
ModuliExpression assemble_moduli(const IsotypicDecomposition& d, const NormalizerDescription& nd);

struct ExpectedEntry {
    std::string name;
    std::string item;  // item of the reference classification, e.g. 3(b)
    ModuliExpression expression;
    ModuliExpression topological;  // stated homeomorphism type
    bool contractible = true;
};

const std::vector<ExpectedEntry>& expected_entries();
std::optional<ExpectedEntry> expected_entry(const std::string& name);

struct VerificationRow {
    std::string name;
    std::string item;
    std::string computed;
    std::string expected;
    std::string computed_topological;
    std::string expected_topological;
    bool computed_contractible = false;
    bool expected_contractible = false;
    std::string reference_match;  // PASS, FAIL, BRACKETED or ABSENT
    std::string note;
};

struct ComputedModuli {
    ModuliExpression expression;
    bool bracketed = false;
    std::string error;  // non-empty when the computation failed
};

std::vector<VerificationRow> verify_against_reference(const std::map<std::string, ComputedModuli>& computed);

}  // namespace flatmod
