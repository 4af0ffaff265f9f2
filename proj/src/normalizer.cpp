#include "flatmod/normalizer.hpp"

#include <algorithm>
#include <set>

namespace flatmod {

namespace {

using Idx = Eigen::Index;
using MatrixSet = std::set<QMatrix, MatrixLess<Rational>>;

bool normalizes_holonomy(const QMatrix& X, const Group& g) {
    QMatrix Xi = inverse(X);
    for (const auto& A : g.holonomy.generators)
        if (!g.holonomy.contains(QMatrix(X * A * Xi))) return false;
    return true;
}

bool is_coordinate_basis(const QMatrix& basis, std::vector<int>& coords) {
    coords.clear();
    for (Idx c = 0; c < basis.cols(); ++c) {
        int hit = -1;
        for (Idx r = 0; r < basis.rows(); ++r) {
            if (basis(r, c).is_zero()) continue;
            if (hit >= 0) return false;
            hit = static_cast<int>(r);
        }
        if (hit < 0) return false;
        coords.push_back(hit);
    }
    std::sort(coords.begin(), coords.end());
    return true;
}

// sub-matrix on the given coordinates, and whether X is block diagonal for (coords, rest)
QMatrix restrict_block(const QMatrix& X, const std::vector<int>& coords) {
    QMatrix B(static_cast<Idx>(coords.size()), static_cast<Idx>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = 0; j < coords.size(); ++j) B(static_cast<Idx>(i), static_cast<Idx>(j)) = X(coords[i], coords[j]);
    return B;
}

bool preserves_split(const QMatrix& X, const std::vector<int>& coords) {
    for (Idx r = 0; r < X.rows(); ++r)
        for (Idx c = 0; c < X.cols(); ++c) {
            bool rin = std::count(coords.begin(), coords.end(), r) > 0;
            bool cin = std::count(coords.begin(), coords.end(), c) > 0;
            if (rin != cin && !X(r, c).is_zero()) return false;
        }
    return true;
}

std::vector<int> complement(const std::vector<int>& coords, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (std::count(coords.begin(), coords.end(), i) == 0) out.push_back(i);
    return out;
}

std::vector<Mat2> unimodular_box(int bound) {
    std::vector<Mat2> out;
    for (int a = -bound; a <= bound; ++a)
        for (int b = -bound; b <= bound; ++b)
            for (int c = -bound; c <= bound; ++c)
                for (int d = -bound; d <= bound; ++d) {
                    Mat2 m{a, b, c, d};
                    if (m.det() == 1 || m.det() == -1) out.push_back(m);
                }
    return out;
}

bool agree_on_box(const Predicate& p, const Predicate& q, const std::vector<Mat2>& box) {
    for (const auto& m : box)
        if (p(m) != q(m)) return false;
    return true;
}

Predicate conjugated(const Predicate& p, const std::optional<Mat2>& by) {
    if (!by) return p;
    Mat2 c = *by, ci = by->inverse();
    return [p, c, ci](const Mat2& m) { return p(c * m * ci); };
}

struct FiniteResult {
    std::vector<QMatrix> elements;
    std::map<QMatrix, QVector, MatrixLess<Rational>> witness;
};

FiniteResult solvable_subset(const Group& g, const std::vector<QMatrix>& candidates, int bound) {
    FiniteResult r;
    for (const auto& X : candidates)
        if (auto x = translation_solvable(X, g)) {
            r.elements.push_back(X);
            r.witness.emplace(X, *x);
        }
    MatrixSet set(r.elements.begin(), r.elements.end());
    const std::string hint = " at entry bound " + std::to_string(bound) + "; rerun with a larger --bound";
    if (!set.count(identity<Rational>(g.dimension())))
        throw NotClosed(g.name() + ": the identity is not among the normalizer candidates" + hint);
    for (const auto& X : r.elements)
        for (const auto& Y : r.elements)
            if (!set.count(QMatrix(X * Y)))
                throw NotClosed(g.name() + ": normalizer candidates are not closed under products" + hint);
    return r;
}

void fill_finite(NormalizerDescription& nd, const FiniteResult& r) {
    nd.finite_elements = r.elements;
    std::sort(nd.finite_elements.begin(), nd.finite_elements.end(), MatrixLess<Rational>{});
    MatrixSet generated;
    for (const auto& X : nd.finite_elements) {
        if (generated.count(X)) continue;
        nd.finite_generators.push_back(X);
        auto G = generate_group(nd.finite_generators);
        generated = MatrixSet(G.begin(), G.end());
    }
    for (const auto& X : nd.finite_generators) nd.witnesses.push_back({X, r.witness.at(X)});
}

std::string coset_label(const Predicate& swap, const std::vector<Mat2>& box, std::optional<Mat2>& conj) {
    const std::pair<std::string, Predicate> cosets[] = {
        {"Gamma_2(4)", subgroup_spec("Gamma_2(4)").predicate},
        {"Gamma(2)Y", [](const Mat2& m) { return m.a % 2 == 0 && m.d % 2 == 0; }},
    };
    for (const auto& [name, p] : cosets)
        for (const std::optional<Mat2>& c : {std::optional<Mat2>{}, std::optional<Mat2>{sl2::J}})
            if (agree_on_box(swap, conjugated(p, c), box)) {
                conj = c;
                return name;
            }
    return "Unidentified";
}

// an identified predicate is evaluated through its registry form
SubgroupSpec effective_spec(const BlockIdentification& id, Predicate computed, const std::string& fallback) {
    if (!id.identified()) return {fallback, std::move(computed), true};
    SubgroupSpec spec = subgroup_spec(id.name);
    return {id.to_string(), conjugated(spec.predicate, id.conjugator), true};
}

}  // namespace

std::vector<Rational> characteristic_polynomial(const QMatrix& A) {
    // Faddeev-LeVerrier
    const Idx n = A.rows();
    std::vector<Rational> c(static_cast<std::size_t>(n + 1));
    c[static_cast<std::size_t>(n)] = Rational(1);
    QMatrix M = QMatrix::Zero(n, n);
    for (Idx k = 1; k <= n; ++k) {
        M = QMatrix(A * M) + identity<Rational>(n) * c[static_cast<std::size_t>(n - k + 1)];
        c[static_cast<std::size_t>(n - k)] = -QMatrix(A * M).trace() / Rational(static_cast<long long>(k));
    }
    return c;
}

bool eigen_multiset_compatible(const QMatrix& A, const QMatrix& B) {
    if (A.rows() != B.rows()) return false;
    return characteristic_polynomial(A) == characteristic_polynomial(B);
}

std::optional<QVector> translation_solvable(const QMatrix& X, const Group& g) {
    if (!g.lattice.preserved_by(X)) throw PreconditionViolated(g.name() + ": X does not preserve the lattice");
    if (!normalizes_holonomy(X, g)) throw PreconditionViolated(g.name() + ": X does not normalize the holonomy");
    QMatrix Xi = inverse(X);
    const Idx n = g.dimension();
    std::vector<QMatrix> As;
    std::vector<QVector> ws;
    for (const auto& a : g.presentation.point_generators) {
        QMatrix B = X * a.matrix * Xi;
        As.push_back(identity<Rational>(n) - B);
        ws.push_back(g.translation_of(B) - X * a.translation);
    }
    return solve_mod_lattice(As, ws, g.lattice);
}

std::optional<QVector> translation_solvable(const QMatrix& X, const BieberbachPresentation& p) {
    return translation_solvable(X, build_group(p));
}

bool normalizes(const Group& g, const QMatrix& X, const QVector& x) {
    AffineMap f = make_affine(X, x);
    AffineMap fi = inverse(f);
    auto check = [&](const AffineMap& a) { return g.contains(compose(compose(f, a), fi)); };
    for (const auto& a : g.presentation.point_generators)
        if (!check(a)) return false;
    for (const auto& t : g.presentation.translation_generators)
        if (!check(t)) return false;
    return true;
}

std::vector<QMatrix> finite_candidates(const Group& g, int bound) {
    const auto& H = g.holonomy;
    if (H.order() == 1)
        throw CapExceeded(g.name() + ": trivial holonomy has an infinite normalizer; it is not enumerated");
    const Idx n = g.dimension();
    const Idx nn = n * n;
    std::vector<std::vector<const QMatrix*>> options;
    for (const auto& A : H.generators) {
        std::vector<const QMatrix*> opts;
        for (const auto& B : H.elements)
            if (eigen_multiset_compatible(A, B)) opts.push_back(&B);
        options.push_back(std::move(opts));
    }
    MatrixSet found;
    std::vector<std::size_t> choice(options.size(), 0);
    const Rational lim(bound);
    while (true) {
        QMatrix sys = QMatrix::Zero(nn * static_cast<Idx>(options.size()), nn);
        for (std::size_t gi = 0; gi < options.size(); ++gi) {
            const QMatrix& A = H.generators[gi];
            const QMatrix& B = *options[gi][choice[gi]];
            const Idx off = static_cast<Idx>(gi) * nn;
            for (Idx r = 0; r < n; ++r)
                for (Idx c = 0; c < n; ++c)
                    for (Idx k = 0; k < n; ++k) {
                        sys(off + r * n + c, r * n + k) += A(k, c);
                        sys(off + r * n + c, k * n + c) -= B(r, k);
                    }
        }
        auto [R, pivots] = rref(sys);
        std::vector<Idx> free;
        for (Idx j = 0; j < nn; ++j)
            if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) free.push_back(j);
        if (!free.empty()) {
            std::vector<int> vals(free.size(), -bound);
            while (true) {
                QVector sol = QVector::Zero(nn);
                for (std::size_t f = 0; f < free.size(); ++f) sol(free[f]) = Rational(vals[f]);
                bool ok = true;
                for (std::size_t p = 0; p < pivots.size() && ok; ++p) {
                    Rational v(0);
                    for (std::size_t f = 0; f < free.size(); ++f)
                        v = v - R(static_cast<Idx>(p), free[f]) * sol(free[f]);
                    sol(pivots[p]) = v;
                    ok = abs(v) <= lim;
                }
                if (ok) {
                    QMatrix X(n, n);
                    for (Idx i = 0; i < n; ++i)
                        for (Idx j = 0; j < n; ++j) X(i, j) = sol(i * n + j);
                    if (!determinant(X).is_zero() && g.lattice.preserved_by(X)) found.insert(X);
                }
                std::size_t f = 0;
                while (f < vals.size() && vals[f] == bound) vals[f++] = -bound;
                if (f == vals.size()) break;
                ++vals[f];
            }
        }
        std::size_t gi = 0;
        while (gi < choice.size() && choice[gi] + 1 == options[gi].size()) choice[gi++] = 0;
        if (gi == choice.size()) break;
        ++choice[gi];
    }
    return {found.begin(), found.end()};
}

std::string BlockIdentification::to_string() const {
    std::string s = name;
    if (conjugator) s = "J " + s + " J";
    return s + " (index " + std::to_string(index) + ")";
}

BlockPredicate::BlockPredicate(std::shared_ptr<const Group> group, std::vector<int> block, bool coupling)
    : group_(std::move(group)), block_(std::move(block)), coupling_(coupling),
      cache_(std::make_shared<std::map<Mat2, bool>>()) {
    if (block_.size() != 2) throw PreconditionViolated("block predicates need a 2-dimensional block");
    lines_ = complement(block_, static_cast<int>(group_->dimension()));
    if (coupling_ && lines_.size() != 2) throw PreconditionViolated("coupling needs exactly two line coordinates");
}

QMatrix BlockPredicate::extend(const Mat2& X) const {
    QMatrix M = identity<Rational>(group_->dimension());
    const std::int64_t e[2][2] = {{X.a, X.b}, {X.c, X.d}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M(block_[i], block_[j]) = Rational(static_cast<long long>(e[i][j]));
    if (coupling_) {
        M(lines_[0], lines_[0]) = Rational(0);
        M(lines_[1], lines_[1]) = Rational(0);
        M(lines_[0], lines_[1]) = Rational(1);
        M(lines_[1], lines_[0]) = Rational(1);
    }
    return M;
}

bool BlockPredicate::operator()(const Mat2& X) const {
    if (X.det() != 1 && X.det() != -1) return false;
    if (auto it = cache_->find(X); it != cache_->end()) return it->second;
    QMatrix M = extend(X);
    bool ok = group_->lattice.preserved_by(M) && normalizes_holonomy(M, *group_) &&
              translation_solvable(M, *group_).has_value();
    cache_->emplace(X, ok);
    return ok;
}

bool block_predicate_eval(const BlockPredicate& bp, const Mat2& X) { return bp(X); }

BlockIdentification identify_predicate(const Predicate& p, std::size_t cap) {
    static const std::vector<Mat2> box = unimodular_box(3);
    BlockIdentification id;
    try {
        id.index = coset_enumeration(SubgroupSpec{"block", p, true}, cap).psl_count;
    } catch (const IndexCapExceeded&) {
        id.index = 0;
    }
    for (const auto& spec : registry())
        for (const std::optional<Mat2>& c : {std::optional<Mat2>{}, std::optional<Mat2>{sl2::J}}) {
            if (!agree_on_box(p, conjugated(spec.predicate, c), box)) continue;
            if (coset_enumeration(spec, cap).psl_count != id.index) continue;
            id.name = spec.name;
            id.conjugator = c;
            return id;
        }
    return id;
}

BlockIdentification identify_block_subgroup(const BlockPredicate& bp) {
    if (bp.coupling()) throw PreconditionViolated("the swap extension is a coset, not a subgroup");
    return identify_predicate([bp](const Mat2& m) { return bp(m); });
}

std::vector<QMatrix> generate_group(const std::vector<QMatrix>& generators, std::size_t cap) {
    if (generators.empty()) return {};
    MatrixSet seen{identity<Rational>(generators.front().rows())};
    std::vector<QMatrix> frontier(seen.begin(), seen.end());
    while (!frontier.empty()) {
        std::vector<QMatrix> next;
        for (const auto& a : frontier)
            for (const auto& g : generators) {
                QMatrix b = a * g;
                if (seen.insert(b).second) {
                    if (seen.size() > cap) throw CapExceeded("generated group exceeds " + std::to_string(cap));
                    next.push_back(std::move(b));
                }
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

bool bracketed_group(const std::string& name) {
    return name == "O4_20" || name == "O4_24" || name == "N4_40" || name == "N4_41";
}

RotationShapes rotation_shapes(const Group& g, const std::vector<int>& rb) {
    bool hexagonal = false;
    for (std::size_t i = 0; i < g.holonomy.order(); ++i) {
        std::size_t k = g.holonomy.element_order(i);
        if (k == 3 || k == 6) hexagonal = true;
    }
    const QMatrix R = hexagonal ? qmatrix({{0, -1}, {1, 1}}) : qmatrix({{0, -1}, {1, 0}});
    const QMatrix E0 = hexagonal ? qmatrix({{1, 1}, {0, -1}}) : qmatrix({{1, 0}, {0, -1}});
    const QMatrix RE = R * E0;
    auto one = [](long long s) { return qmatrix({{Rational(s)}}); };
    const bool rot_first = rb.front() == 0;
    RotationShapes out;
    if (!rot_first) {
        for (long long s : {1, -1}) {
            out.lower["A"].push_back(block_diagonal({one(s), one(1), R}));
            out.lower["B"].push_back(block_diagonal({one(1), one(s), R}));
        }
        for (long long s : {1, -1}) {
            out.lower["A"].push_back(block_diagonal({one(s), one(-1), RE}));
            out.lower["B"].push_back(block_diagonal({one(-1), one(s), RE}));
        }
    } else {
        for (long long s : {1, -1}) out.lower["C"].push_back(block_diagonal({R, one(s), one(1)}));
        for (long long s : {1, -1}) out.lower["C"].push_back(block_diagonal({RE, one(s), one(-1)}));
    }
    if (g.name() == "N4_41") {
        const QMatrix Jm = qmatrix({{0, 1}, {1, 0}});
        const QMatrix Id2 = identity<Rational>(2);
        out.upper = {block_diagonal({QMatrix(-Id2), Id2}), block_diagonal({Jm, Id2}), block_diagonal({Id2, R}),
                     block_diagonal({Id2, E0})};
    } else {
        for (long long s : {1, -1})
            for (long long t : {1, -1})
                for (const QMatrix* B : {&R, &E0})
                    out.upper.push_back(rot_first ? block_diagonal({*B, one(s), one(t)})
                                                  : block_diagonal({one(s), one(t), *B}));
    }
    return out;
}

NormalizerDescription ctype_normalizer(const Group& g, int bound) {
    IsotypicDecomposition D = isotypic_decomposition(g.holonomy);
    std::vector<int> rb;
    for (const auto& c : D.components)
        if (c.dimension() == 2 && c.multiplicity == 1 && is_coordinate_basis(c.basis, rb)) break;
    if (rb.size() != 2) throw PreconditionViolated(g.name() + " has no 2-dimensional rotation block on coordinates");
    NormalizerDescription nd;
    nd.group = g.name();
    nd.bound = bound;
    nd.rotation_block = rb;
    FiniteResult r = solvable_subset(g, finite_candidates(g, bound), bound);
    for (const auto& X : r.elements)
        if (!preserves_split(X, rb))
            throw InconsistentInvariants(g.name() + ": normalizer element " + to_string(X) +
                                         " mixes the rotation block with the lines");
    fill_finite(nd, r);
    nd.finite_order = nd.finite_elements.size();
    MatrixSet N(nd.finite_elements.begin(), nd.finite_elements.end());
    RotationShapes shapes = rotation_shapes(g, rb);
    for (const auto& [name, gens] : shapes.lower) {
        auto G = generate_group(gens);
        if (MatrixSet(G.begin(), G.end()) == N) nd.shape = name;
    }
    nd.bracket_only = bracketed_group(g.name());
    auto U = generate_group(shapes.upper);
    MatrixSet upper(U.begin(), U.end());
    MatrixSet lower(g.holonomy.elements.begin(), g.holonomy.elements.end());
    const bool above = std::includes(N.begin(), N.end(), lower.begin(), lower.end(), MatrixLess<Rational>{});
    const bool below = std::includes(upper.begin(), upper.end(), N.begin(), N.end(), MatrixLess<Rational>{});
    if (N == lower) nd.bracket_position = "lower";
    else if (N == upper) nd.bracket_position = "upper";
    else if (above && below) nd.bracket_position = "between";
    else nd.bracket_position = "outside";
    return nd;
}

NormalizerDescription normalizer_matrix_part(const Group& g, int bound, int word_bound) {
    IsotypicDecomposition D = isotypic_decomposition(g.holonomy);
    const IsotypicComponent* block = nullptr;
    bool rotation = false;
    for (const auto& c : D.components) {
        if (c.multiplicity == 2 && c.irreducible_dimension == 1) block = &c;
        if (c.multiplicity == 1 && c.irreducible_dimension == 2) rotation = true;
    }
    if (rotation && !block) return ctype_normalizer(g, bound);

    NormalizerDescription nd;
    nd.group = g.name();
    nd.bound = bound;
    if (!block) {
        fill_finite(nd, solvable_subset(g, finite_candidates(g, bound), bound));
        nd.finite_order = nd.finite_elements.size();
        return nd;
    }

    ArithmeticBlock ab;
    if (!is_coordinate_basis(block->basis, ab.block_coordinates))
        throw PreconditionViolated(g.name() + ": the 2-dimensional block is not spanned by coordinate vectors");
    ab.line_coordinates = complement(ab.block_coordinates, static_cast<int>(g.dimension()));
    std::vector<QMatrix> fixed_block;
    const QMatrix Id2 = identity<Rational>(2);
    for (const auto& X : finite_candidates(g, bound))
        if (preserves_split(X, ab.block_coordinates) && restrict_block(X, ab.block_coordinates) == Id2)
            fixed_block.push_back(X);
    fill_finite(nd, solvable_subset(g, fixed_block, bound));

    auto shared = std::make_shared<const Group>(g);
    BlockPredicate keep(shared, ab.block_coordinates, false);
    BlockPredicate swap(shared, ab.block_coordinates, true);
    ab.subgroup = identify_block_subgroup(keep);
    SubgroupSpec gamma1_spec = effective_spec(ab.subgroup, [keep](const Mat2& m) { return keep(m); }, "Gamma_1");
    ab.block_surface = classify_surface(gamma1_spec);
    ab.swap_in_finite_part = swap(sl2::Id);

    static const std::vector<Mat2> box = unimodular_box(3);
    if (!ab.swap_in_finite_part) {
        std::optional<Mat2> b0;
        for (const Mat2& m : {Mat2{1, 0, 2, 1}, sl2::Y})
            if (swap(m)) {
                b0 = m;
                break;
            }
        if (!b0)
            for (const auto& m : box)
                if (swap(m)) {
                    b0 = m;
                    break;
                }
        if (b0) {
            ab.coupling = b0;
            ab.coupling_coset = coset_label([swap](const Mat2& m) { return swap(m); }, box, ab.coupling_conjugator);
            Predicate joined = [keep, swap](const Mat2& m) { return keep(m) || swap(m); };
            ab.union_subgroup = identify_predicate(joined);
            SubgroupSpec joined_spec = effective_spec(*ab.union_subgroup, joined, "union");
            ab.union_surface = classify_surface(joined_spec);
            InvolutionReport rep = involution_analysis(*b0, gamma1_spec, word_bound);
            ab.involution_summary = rep.summary();
            ab.involution_identity = rep.identity_inducing.has_value();
            ab.involution_fixed_point = rep.fixed_point_found();
        }
    }
    nd.arithmetic_block = std::move(ab);
    return nd;
}

NormalizerDescription normalizer_matrix_part(const BieberbachPresentation& p, int bound, int word_bound) {
    return normalizer_matrix_part(build_group(p), bound, word_bound);
}

}  // namespace flatmod
