#include "flatmod/moduli.hpp"

#include <algorithm>
#include <set>

namespace flatmod {

namespace {

using Kind = ModuliExpression::Kind;

ModuliExpression leaf(Kind k, int power, std::string label = {}, std::string detail = {}) {
    ModuliExpression e;
    e.kind = k;
    e.power = power;
    e.label = std::move(label);
    e.detail = std::move(detail);
    return e;
}

std::string power_suffix(int k) { return k == 1 ? "" : "^" + std::to_string(k); }

// component index of each component's image under X, or the offending component
std::vector<int> component_permutation(const QMatrix& X, const IsotypicDecomposition& d) {
    std::vector<int> perm;
    for (const auto& c : d.components) {
        std::optional<std::size_t> target;
        for (Eigen::Index j = 0; j < c.basis.cols(); ++j) {
            auto t = d.component_of(QVector(X * c.basis.col(j)));
            if (!t || (target && *t != *target))
                throw UnhandledAction("normalizer element " + to_string(X) + " does not permute the isotypic components");
            target = t;
        }
        perm.push_back(static_cast<int>(*target));
    }
    return perm;
}

// permutations of the listed components induced by the given matrices
std::vector<Permutation> induced_permutations(const std::vector<QMatrix>& gens, const IsotypicDecomposition& d,
                                              const std::vector<int>& components) {
    std::vector<Permutation> out;
    for (const auto& X : gens) {
        auto full = component_permutation(X, d);
        Permutation p;
        for (int c : components) {
            auto it = std::find(components.begin(), components.end(), full[static_cast<std::size_t>(c)]);
            if (it == components.end())
                throw UnhandledAction("normalizer element " + to_string(X) + " moves a line into another factor");
            p.push_back(static_cast<int>(it - components.begin()));
        }
        out.push_back(std::move(p));
    }
    return out;
}

bool has_rotation(const QMatrix& X, const std::vector<int>& block) {
    QMatrix B(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) B(i, j) = X(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
    if (determinant(B) != Rational(1)) return false;
    QMatrix P = B;
    for (int k = 1; k <= 12; ++k) {
        if (P == identity<Rational>(2)) return k >= 3;
        P = P * B;
    }
    return false;
}

std::string quotient_label(const BlockIdentification& id) {
    return id.identified() ? id.name : "Unidentified[index " + std::to_string(id.index) + "]";
}

}  // namespace

ModuliExpression rplus(int k) { return leaf(Kind::RPlusPower, k); }
ModuliExpression half_line(int m) { return leaf(Kind::HalfLinePower, m); }
ModuliExpression circle() { return leaf(Kind::Circle, 1, "S1"); }
ModuliExpression surface(const std::string& name) { return leaf(Kind::Surface, 1, name); }
ModuliExpression double_quotient(const std::string& subgroup, const std::string& surface_name) {
    return leaf(Kind::DoubleQuotient, 1, subgroup, surface_name);
}
ModuliExpression attached(const std::string& quotient, const std::string& surface_name, const std::string& family) {
    ModuliExpression e = leaf(Kind::Attached, 1, quotient, surface_name);
    e.children.push_back(leaf(Kind::Surface, 1, family));
    return e;
}
ModuliExpression orbifold_sector(int k, const std::string& group) { return leaf(Kind::OrbifoldSector, k, group); }
ModuliExpression product(std::vector<ModuliExpression> factors) {
    ModuliExpression e;
    e.kind = Kind::Product;
    e.children = std::move(factors);
    return normalize(std::move(e));
}

ModuliExpression normalize(ModuliExpression e) {
    if (e.kind != Kind::Product) return e;
    std::vector<ModuliExpression> flat;
    int r = 0, h = 0;
    for (auto& c : e.children) {
        ModuliExpression n = normalize(std::move(c));
        std::vector<ModuliExpression> parts;
        if (n.kind == Kind::Product) parts = std::move(n.children);
        else parts.push_back(std::move(n));
        for (auto& p : parts) {
            if (p.kind == Kind::RPlusPower) r += p.power;
            else if (p.kind == Kind::HalfLinePower) h += p.power;
            else flat.push_back(std::move(p));
        }
    }
    if (r > 0) flat.push_back(rplus(r));
    if (h > 0) flat.push_back(half_line(h));
    std::stable_sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.to_string() < b.to_string();
    });
    if (flat.size() == 1) return flat.front();
    e.children = std::move(flat);
    return e;
}

std::string ModuliExpression::to_string() const {
    switch (kind) {
        case Kind::Circle: return "S1";
        case Kind::Surface: return label;
        case Kind::DoubleQuotient: return "O(2)\\GL(2,R)/" + label;
        case Kind::Attached: return "(X1 u_ft X2)[X1=X2=H2/" + label + "+]";
        case Kind::OrbifoldSector: return "(R+)^" + std::to_string(power) + "/" + label;
        case Kind::RPlusPower: return power == 1 ? "R+" : "(R+)^" + std::to_string(power);
        case Kind::HalfLinePower: return "[0,inf)" + power_suffix(power);
        case Kind::Product: {
            if (children.empty()) return "point";
            std::string s;
            for (const auto& c : children) s += (s.empty() ? "" : " x ") + c.to_string();
            return s;
        }
    }
    return "?";
}

int ModuliExpression::dimension() const {
    switch (kind) {
        case Kind::Circle: return 1;
        case Kind::Surface: return 2;
        case Kind::DoubleQuotient: return 3;
        case Kind::Attached: return 2;
        case Kind::OrbifoldSector:
        case Kind::RPlusPower:
        case Kind::HalfLinePower: return power;
        case Kind::Product: {
            int d = 0;
            for (const auto& c : children) d += c.dimension();
            return d;
        }
    }
    return 0;
}

ModuliExpression topological_form(const ModuliExpression& e) {
    switch (e.kind) {
        case Kind::DoubleQuotient: return product({rplus(1), topological_form(surface(e.detail))});
        case Kind::Surface:
            if (e.label == "cylinder S1xR") return product({circle(), rplus(1)});
            if (e.label == "plane R2") return rplus(2);
            return e;
        case Kind::Attached: {
            ModuliExpression a = e;
            a.label = e.detail;
            a.detail.clear();
            a.children.clear();
            return a;
        }
        case Kind::Product: {
            std::vector<ModuliExpression> parts;
            for (const auto& c : e.children) parts.push_back(topological_form(c));
            return product(std::move(parts));
        }
        default: return e;
    }
}

bool ModuliExpression::contractible() const {
    auto cell = [](const ModuliExpression& c) {
        return c.kind == Kind::RPlusPower || c.kind == Kind::HalfLinePower;
    };
    ModuliExpression t = topological_form(*this);
    if (t.kind != Kind::Product) return cell(t);
    return std::all_of(t.children.begin(), t.children.end(), cell);
}

std::vector<Permutation> generate_permutation_group(int k, const std::vector<Permutation>& generators) {
    Permutation id(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) id[static_cast<std::size_t>(i)] = i;
    std::set<Permutation> seen{id};
    std::vector<Permutation> frontier{id};
    while (!frontier.empty()) {
        std::vector<Permutation> next;
        for (const auto& p : frontier)
            for (const auto& g : generators) {
                Permutation q(p.size());
                for (std::size_t i = 0; i < p.size(); ++i) q[i] = g[static_cast<std::size_t>(p[i])];
                if (seen.insert(q).second) next.push_back(q);
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

ModuliExpression quotient_rplus_by_perms(int k, const std::vector<Permutation>& generators) {
    auto G = generate_permutation_group(k, generators);
    if (G.size() == 1) return rplus(k);
    // orbit sizes
    std::vector<int> orbit(static_cast<std::size_t>(k), -1);
    std::vector<int> sizes;
    for (int i = 0; i < k; ++i) {
        if (orbit[static_cast<std::size_t>(i)] >= 0) continue;
        std::set<int> o;
        for (const auto& p : G) o.insert(p[static_cast<std::size_t>(i)]);
        for (int j : o) orbit[static_cast<std::size_t>(j)] = static_cast<int>(sizes.size());
        sizes.push_back(static_cast<int>(o.size()));
    }
    const int fixed = static_cast<int>(std::count(sizes.begin(), sizes.end(), 1));
    const int moved = k - fixed;
    if (G.size() == 2 && moved == 2) return product({rplus(k - 1), half_line(1)});
    if (G.size() == 6 && moved == 3 && sizes.size() == static_cast<std::size_t>(fixed + 1))
        return product({rplus(fixed + 1), half_line(2)});
    std::string desc = "G[order " + std::to_string(G.size()) + ", orbits";
    for (int s : sizes) desc += " " + std::to_string(s);
    return orbifold_sector(k, desc + "]");
}

ModuliExpression reduce_ctype_factor(const NormalizerDescription& nd, const IsotypicDecomposition& d) {
    if (nd.rotation_block.size() != 2)
        throw PreconditionViolated(nd.group + ": no rotation block in the normalizer description");
    if (std::none_of(nd.finite_elements.begin(), nd.finite_elements.end(),
                     [&](const QMatrix& X) { return has_rotation(X, nd.rotation_block); }))
        throw MissingRotationGenerator(nd.group + ": the normalizer has no rotation on the rotation block");
    std::vector<int> lines;
    for (std::size_t i = 0; i < d.components.size(); ++i)
        if (d.components[i].dimension() == 1) lines.push_back(static_cast<int>(i));
    auto perms = induced_permutations(nd.finite_generators, d, lines);
    return product({rplus(1), quotient_rplus_by_perms(static_cast<int>(lines.size()), perms)});
}

ModuliExpression assemble_moduli(const IsotypicDecomposition& d, const NormalizerDescription& nd) {
    if (!nd.rotation_block.empty()) return reduce_ctype_factor(nd, d);
    std::vector<int> lines;
    for (std::size_t i = 0; i < d.components.size(); ++i) {
        const auto& c = d.components[i];
        if (c.multiplicity == 1 && c.division_type == DivisionType::R) lines.push_back(static_cast<int>(i));
        else if (!(nd.arithmetic_block && c.multiplicity == 2 && c.division_type == DivisionType::R))
            throw UnhandledAction(nd.group + ": no reduction for a component of type " +
                                  flatmod::to_string(c.division_type) + " with multiplicity " +
                                  std::to_string(c.multiplicity));
    }
    auto perms = induced_permutations(nd.finite_generators, d, lines);
    ModuliExpression line_part = quotient_rplus_by_perms(static_cast<int>(lines.size()), perms);
    if (!nd.arithmetic_block) return line_part;
    const ArithmeticBlock& ab = *nd.arithmetic_block;
    if (ab.coupling) {
        if (ab.swap_in_finite_part) throw UnhandledAction(nd.group + ": coupling and finite swap together");
        const std::string family = "f_t: identity on the fixed locus of B0 = " + ab.coupling->str() +
                                   " for t > 0, identity on X1 at t = 0";
        return product({attached(quotient_label(*ab.union_subgroup), ab.union_surface->underlying_name, family),
                        rplus(static_cast<int>(lines.size())), half_line(1)});
    }
    return product({double_quotient(quotient_label(ab.subgroup), ab.block_surface.underlying_name), line_part});
}

const std::vector<ExpectedEntry>& expected_entries() {
    static const std::vector<ExpectedEntry> entries = [] {
        std::vector<ExpectedEntry> v;
        auto add = [&](std::vector<std::string> names, std::string item, ModuliExpression e,
                       std::optional<ModuliExpression> topo = std::nullopt) {
            for (auto& n : names) {
                ModuliExpression t = topo ? *topo : topological_form(e);
                ExpectedEntry x{n, item, e, t, t.contractible()};
                v.push_back(std::move(x));
            }
        };
        const std::string cyl = "cylinder S1xR", tps = "3-punctured sphere";
        add({"O4_9", "O4_11", "O4_12", "O4_15", "O4_16", "O4_17", "N4_45"}, "1(a)", product({rplus(3), half_line(1)}));
        add({"O4_14"}, "1(b)", product({rplus(2), half_line(2)}));
        add({"O4_10", "O4_13", "N4_30", "N4_31", "N4_32", "N4_33", "N4_34", "N4_35", "N4_36", "N4_37", "N4_38",
             "N4_39", "N4_46"},
            "1(c)", rplus(4));
        add({"O4_26", "O4_27", "N4_43"}, "2", rplus(2));
        add({"N4_22"}, "3(a)", product({double_quotient("GL2Z", "plane R2"), rplus(2)}));
        add({"N4_8", "N4_9", "N4_23", "N4_24", "N4_25", "N4_26"}, "3(b)",
            product({double_quotient("Gamma0(2)^t", cyl), rplus(2)}), product({circle(), rplus(4)}));
        add({"N4_4", "N4_10", "N4_11", "N4_12", "N4_13"}, "3(c)", product({double_quotient("Gamma(2)", tps), rplus(2)}),
            product({surface(tps), rplus(3)}));
        auto att = [](const std::string& q, const std::string& s) {
            return product({attached(q, s, ""), rplus(2), half_line(1)});
        };
        add({"N4_3", "N4_5", "N4_6"}, "3(d)", att("Gamma(2)Y", cyl), topological_form(att("Gamma(2)Y", cyl)));
        add({"N4_7"}, "3(e)", att("Gamma(2)", tps), topological_form(att("Gamma(2)", tps)));
        add({"N4_44"}, "3(f)", product({double_quotient("Gamma0(2)^t", cyl), rplus(1), half_line(1)}),
            product({circle(), rplus(3), half_line(1)}));
        add({"O4_18", "O4_19", "O4_20", "O4_21", "O4_22", "O4_23", "O4_24", "O4_25", "N4_27", "N4_28", "N4_29",
             "N4_40", "N4_41", "N4_42", "N4_47"},
            "4", rplus(3));
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        return v;
    }();
    return entries;
}

std::optional<ExpectedEntry> expected_entry(const std::string& name) {
    for (const auto& e : expected_entries())
        if (e.name == name) return e;
    return std::nullopt;
}

std::vector<VerificationRow> verify_against_reference(const std::map<std::string, ComputedModuli>& computed) {
    std::vector<VerificationRow> rows;
    for (const auto& e : expected_entries()) {
        VerificationRow r;
        r.name = e.name;
        r.item = e.item;
        r.expected = e.expression.to_string();
        r.expected_topological = e.topological.to_string();
        r.expected_contractible = e.contractible;
        auto it = computed.find(e.name);
        if (it == computed.end()) {
            r.reference_match = "ABSENT";
            r.note = "manifold missing from the corpus";
            rows.push_back(std::move(r));
            continue;
        }
        const ComputedModuli& c = it->second;
        if (!c.error.empty()) {
            r.reference_match = "FAIL";
            r.note = c.error;
            rows.push_back(std::move(r));
            continue;
        }
        r.computed = c.expression.to_string();
        r.computed_topological = topological_form(c.expression).to_string();
        r.computed_contractible = c.expression.contractible();
        const bool match = r.computed == r.expected && r.computed_topological == r.expected_topological &&
                           r.computed_contractible == r.expected_contractible;
        if (!match) r.reference_match = "FAIL";
        else r.reference_match = c.bracketed ? "BRACKETED" : "PASS";
        if (c.bracketed) r.note = "normalizer only bracketed by containment bounds";
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace flatmod
