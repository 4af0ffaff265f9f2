#pragma once

#include "flatmod/exact_core.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flatmod {

// x -> A x + v
struct AffineMap {
    QMatrix matrix;
    QVector translation;

    Eigen::Index dimension() const { return matrix.rows(); }
    friend bool operator==(const AffineMap& f, const AffineMap& g) {
        return f.matrix == g.matrix && f.translation == g.translation;
    }
};

AffineMap make_affine(QMatrix A, QVector v);
AffineMap identity_map(Eigen::Index n);
AffineMap pure_translation(QVector v);
// (A, v)(B, w) = (AB, Aw + v)
AffineMap compose(const AffineMap& f, const AffineMap& g);
AffineMap inverse(const AffineMap& f);
AffineMap conjugate(const AffineMap& by, const AffineMap& f);  // by f by^-1

struct BieberbachPresentation {
    std::string name;
    Eigen::Index dimension = 0;
    std::vector<AffineMap> translation_generators;
    std::vector<AffineMap> point_generators;
    std::string basis_note;  // how the coordinates relate to the tabulated ones, if they differ
};

struct HolonomyGroup {
    std::vector<QMatrix> generators;
    std::vector<QMatrix> elements;
    std::size_t identity_index = 0;
    std::vector<std::vector<std::size_t>> table;  // table[i][j] = index of elements[i] * elements[j]
    // words[i] lists generator indices g1 g2 ... with elements[i] = A_g1 A_g2 ...
    std::vector<std::vector<std::size_t>> words;

    std::size_t order() const { return elements.size(); }
    std::optional<std::size_t> index_of(const QMatrix& M) const;
    bool contains(const QMatrix& M) const { return index_of(M).has_value(); }
    std::size_t element_order(std::size_t i) const;

    std::map<QMatrix, std::size_t, MatrixLess<Rational>> lookup;
};

HolonomyGroup holonomy_closure(const std::vector<QMatrix>& gens, std::size_t cap = 1024);

// v_B for each holonomy element, indexed like HolonomyGroup::elements
struct CosetTranslationMap {
    std::vector<QVector> translations;
    const QVector& operator[](std::size_t i) const { return translations[i]; }
};

Lattice translation_lattice(const BieberbachPresentation& p);
CosetTranslationMap canonical_translations(const BieberbachPresentation& p);
CosetTranslationMap canonical_translations(const BieberbachPresentation& p, const HolonomyGroup& H,
                                           const Lattice& L);
bool torsion_free_check(const BieberbachPresentation& p);

// Holonomy, lattice and translations of a presentation, validated in that order.
struct Group {
    BieberbachPresentation presentation;
    HolonomyGroup holonomy;
    Lattice lattice;
    CosetTranslationMap translations;

    const std::string& name() const { return presentation.name; }
    Eigen::Index dimension() const { return presentation.dimension; }
    bool contains(const AffineMap& f) const;
    const QVector& translation_of(const QMatrix& B) const;
};

Group build_group(const BieberbachPresentation& p, std::size_t cap = 1024);
bool torsion_free(const Group& g);

BieberbachPresentation parse_presentation(const std::string& document);
BieberbachPresentation load_presentation(const std::string& path);
std::string to_json(const BieberbachPresentation& p);

}  // namespace flatmod
