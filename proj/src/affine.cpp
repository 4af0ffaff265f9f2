#include "flatmod/affine.hpp"

#include <nlohmann/json.hpp>

#include <deque>
#include <fstream>
#include <sstream>

namespace flatmod {

AffineMap make_affine(QMatrix A, QVector v) {
    if (A.rows() != A.cols() || A.rows() != v.size()) throw PreconditionViolated("affine map of mismatched shape");
    if (determinant(A) == Rational(0)) throw PreconditionViolated("affine map with singular matrix part");
    return {std::move(A), std::move(v)};
}

AffineMap identity_map(Eigen::Index n) { return {identity<Rational>(n), QVector::Zero(n)}; }

AffineMap pure_translation(QVector v) { return {identity<Rational>(v.size()), std::move(v)}; }

AffineMap compose(const AffineMap& f, const AffineMap& g) {
    if (f.dimension() != g.dimension()) throw PreconditionViolated("composing maps of different dimensions");
    return {f.matrix * g.matrix, f.matrix * g.translation + f.translation};
}

AffineMap inverse(const AffineMap& f) {
    QMatrix Ai = inverse(f.matrix);
    return {Ai, -(Ai * f.translation)};
}

AffineMap conjugate(const AffineMap& by, const AffineMap& f) { return compose(compose(by, f), inverse(by)); }

std::optional<std::size_t> HolonomyGroup::index_of(const QMatrix& M) const {
    auto it = lookup.find(M);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

std::size_t HolonomyGroup::element_order(std::size_t i) const {
    std::size_t k = 1;
    for (std::size_t cur = i; cur != identity_index; cur = table[cur][i]) ++k;
    return k;
}

HolonomyGroup holonomy_closure(const std::vector<QMatrix>& gens, std::size_t cap) {
    if (gens.empty()) throw PreconditionViolated("holonomy closure needs at least one generator");
    const Eigen::Index n = gens.front().rows();
    for (const auto& g : gens)
        if (g.rows() != n || g.cols() != n || determinant(g) == Rational(0))
            throw PreconditionViolated("holonomy generators must be invertible and of equal size");

    HolonomyGroup H;
    H.generators = gens;
    auto add = [&](QMatrix M, std::vector<std::size_t> word) {
        H.lookup.emplace(M, H.elements.size());
        H.elements.push_back(std::move(M));
        H.words.push_back(std::move(word));
    };
    add(identity<Rational>(n), {});
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t b = queue.front();
        queue.pop_front();
        for (std::size_t g = 0; g < gens.size(); ++g) {
            QMatrix C = gens[g] * H.elements[b];
            if (H.lookup.count(C)) continue;
            if (H.elements.size() >= cap)
                throw CapExceeded("holonomy closure exceeded " + std::to_string(cap) + " elements");
            std::vector<std::size_t> w{g};
            w.insert(w.end(), H.words[b].begin(), H.words[b].end());
            add(std::move(C), std::move(w));
            queue.push_back(H.elements.size() - 1);
        }
    }
    const std::size_t N = H.elements.size();
    H.table.assign(N, std::vector<std::size_t>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            auto k = H.index_of(H.elements[i] * H.elements[j]);
            if (!k) throw PreconditionViolated("holonomy closure is not closed under products");
            H.table[i][j] = *k;
        }
    return H;
}

namespace {

std::vector<QMatrix> point_matrices(const BieberbachPresentation& p) {
    std::vector<QMatrix> out;
    for (const auto& g : p.point_generators) out.push_back(g.matrix);
    return out;
}

Lattice lattice_of_generators(const BieberbachPresentation& p) {
    std::vector<QVector> vs;
    for (const auto& t : p.translation_generators) vs.push_back(t.translation);
    return hnf_lattice(vs);
}

void check_lattice_closure(const BieberbachPresentation& p, const HolonomyGroup& H, const Lattice& L) {
    for (std::size_t k = 0; k < p.point_generators.size(); ++k) {
        const auto& g = p.point_generators[k];
        if (!L.preserved_by(g.matrix))
            throw NotClosed(p.name + ": point generator " + std::to_string(k) + " does not preserve the lattice");
        std::size_t order = H.element_order(*H.index_of(g.matrix));
        AffineMap gk = identity_map(p.dimension);
        for (std::size_t i = 0; i < order; ++i) gk = compose(g, gk);
        if (!L.contains(gk.translation))
            throw NotClosed(p.name + ": power " + std::to_string(order) + " of point generator " + std::to_string(k) +
                            " translates by " + to_string(gk.translation) + ", outside the lattice");
    }
}

}  // namespace

Lattice translation_lattice(const BieberbachPresentation& p) {
    for (const auto& t : p.translation_generators)
        if (t.matrix != identity<Rational>(p.dimension))
            throw PreconditionViolated(p.name + ": translation generator with nontrivial matrix part");
    Lattice L = lattice_of_generators(p);
    HolonomyGroup H = holonomy_closure(point_matrices(p));
    check_lattice_closure(p, H, L);
    return L;
}

CosetTranslationMap canonical_translations(const BieberbachPresentation& p) {
    HolonomyGroup H = holonomy_closure(point_matrices(p));
    return canonical_translations(p, H, translation_lattice(p));
}

CosetTranslationMap canonical_translations(const BieberbachPresentation& p, const HolonomyGroup& H,
                                           const Lattice& L) {
    // lift each element along its discovery word; words are prefix-closed from the right
    std::vector<std::optional<QVector>> v(H.order());
    v[H.identity_index] = QVector::Zero(p.dimension);
    for (std::size_t i = 0; i < H.order(); ++i) {
        QVector t = QVector::Zero(p.dimension);
        for (auto it = H.words[i].rbegin(); it != H.words[i].rend(); ++it) {
            const auto& g = p.point_generators[*it];
            t = g.matrix * t + g.translation;
        }
        v[i] = L.reduce(t);
    }
    // cocycle check: every lift of every product agrees modulo L
    for (std::size_t b = 0; b < H.order(); ++b)
        for (const auto& g : p.point_generators) {
            std::size_t c = *H.index_of(g.matrix * H.elements[b]);
            QVector diff = g.matrix * *v[b] + g.translation - *v[c];
            if (!L.contains(diff))
                throw NotClosed(p.name + ": two lifts of a holonomy element differ by " + to_string(diff) +
                                ", which is not a lattice vector");
        }
    CosetTranslationMap out;
    for (auto& x : v) out.translations.push_back(std::move(*x));
    return out;
}

Group build_group(const BieberbachPresentation& p, std::size_t cap) {
    Group G;
    G.presentation = p;
    G.holonomy = holonomy_closure(point_matrices(p), cap);
    G.lattice = lattice_of_generators(p);
    check_lattice_closure(p, G.holonomy, G.lattice);
    G.translations = canonical_translations(p, G.holonomy, G.lattice);
    return G;
}

bool Group::contains(const AffineMap& f) const {
    auto i = holonomy.index_of(f.matrix);
    if (!i) return false;
    return lattice.contains(f.translation - translations[*i]);
}

const QVector& Group::translation_of(const QMatrix& B) const {
    auto i = holonomy.index_of(B);
    if (!i) throw PreconditionViolated(name() + ": matrix is not in the holonomy");
    return translations[*i];
}

bool torsion_free(const Group& G) {
    const auto& H = G.holonomy;
    const Eigen::Index n = G.dimension();
    for (std::size_t i = 0; i < H.order(); ++i) {
        if (i == H.identity_index) continue;
        // (A, v + t)^k = (Id, N_A (v + t)); torsion iff N_A t = -N_A v for some t in L
        QMatrix N = QMatrix::Zero(n, n);
        QMatrix P = identity<Rational>(n);
        for (std::size_t k = 0; k < H.element_order(i); ++k) {
            N += P;
            P = P * H.elements[i];
        }
        QVector s = N * G.translations[i];
        if (integer_solvable(QMatrix(N * G.lattice.basis()), QVector(-s))) return false;
    }
    return true;
}

bool torsion_free_check(const BieberbachPresentation& p) { return torsion_free(build_group(p)); }

namespace {

using nlohmann::json;

Rational parse_entry(const json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw ParseError(where + ": expected a rational written as a string \"p/q\"");
}

QVector parse_vector(const json& j, Eigen::Index n, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array");
    if (static_cast<Eigen::Index>(j.size()) != n)
        throw ParseError(where + ": has " + std::to_string(j.size()) + " entries, expected " + std::to_string(n));
    QVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = parse_entry(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

QMatrix parse_matrix(const json& j, Eigen::Index n, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
    if (static_cast<Eigen::Index>(j.size()) != n)
        throw ParseError(where + ": has " + std::to_string(j.size()) + " rows, expected " + std::to_string(n));
    QMatrix M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        M.row(i) = parse_vector(j[i], n, where + "[" + std::to_string(i) + "]").transpose();
    return M;
}

const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return doc[key];
}

}  // namespace

BieberbachPresentation parse_presentation(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("document is not an object");
    BieberbachPresentation p;
    if (!field(doc, "name").is_string()) throw ParseError("name: expected a string");
    p.name = doc["name"].get<std::string>();
    if (!field(doc, "dimension").is_number_integer() || doc["dimension"].get<long long>() < 1)
        throw ParseError(p.name + ": dimension: expected a positive integer");
    p.dimension = doc["dimension"].get<long long>();
    if (doc.contains("basis")) p.basis_note = doc["basis"].get<std::string>();
    const auto& ts = field(doc, "translations");
    if (!ts.is_array()) throw ParseError(p.name + ": translations: expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i)
        p.translation_generators.push_back(
            pure_translation(parse_vector(ts[i], p.dimension, p.name + ": translations[" + std::to_string(i) + "]")));
    const auto& gs = field(doc, "generators");
    if (!gs.is_array()) throw ParseError(p.name + ": generators: expected an array");
    for (std::size_t i = 0; i < gs.size(); ++i) {
        std::string where = p.name + ": generators[" + std::to_string(i) + "]";
        if (!gs[i].is_object()) throw ParseError(where + ": expected an object");
        QMatrix A = parse_matrix(field(gs[i], "matrix"), p.dimension, where + ".matrix");
        QVector v = parse_vector(field(gs[i], "translation"), p.dimension, where + ".translation");
        if (determinant(A) == Rational(0)) throw ParseError(where + ".matrix: singular");
        if (A == identity<Rational>(p.dimension)) throw ParseError(where + ".matrix: identity matrix part");
        p.point_generators.push_back({std::move(A), std::move(v)});
    }
    if (p.point_generators.empty()) throw ParseError(p.name + ": no point generators");
    return p;
}

BieberbachPresentation load_presentation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_presentation(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string to_json(const BieberbachPresentation& p) {
    json doc;
    doc["name"] = p.name;
    doc["dimension"] = p.dimension;
    if (!p.basis_note.empty()) doc["basis"] = p.basis_note;
    auto vec = [](const QVector& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i).str());
        return a;
    };
    doc["translations"] = json::array();
    for (const auto& t : p.translation_generators) doc["translations"].push_back(vec(t.translation));
    doc["generators"] = json::array();
    for (const auto& g : p.point_generators) {
        json m = json::array();
        for (Eigen::Index i = 0; i < g.matrix.rows(); ++i) m.push_back(vec(g.matrix.row(i).transpose()));
        doc["generators"].push_back({{"matrix", m}, {"translation", vec(g.translation)}});
    }
    return doc.dump(2);
}

}  // namespace flatmod
