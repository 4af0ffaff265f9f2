#pragma once

#include "flatmod/affine.hpp"
#include "flatmod/congruence.hpp"
#include "flatmod/isotypic.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flatmod {

// coefficients low to high, monic
std::vector<Rational> characteristic_polynomial(const QMatrix& A);
bool eigen_multiset_compatible(const QMatrix& A, const QMatrix& B);

// x with (X, x) normalizing the group, or nothing
std::optional<QVector> translation_solvable(const QMatrix& X, const Group& g);
std::optional<QVector> translation_solvable(const QMatrix& X, const BieberbachPresentation& p);
// (X, x) alpha (X, x)^-1 lies in the group for every generator alpha, checked by composition
bool normalizes(const Group& g, const QMatrix& X, const QVector& x);

// X with entries of absolute value <= bound, X H X^-1 = H, X L = L
std::vector<QMatrix> finite_candidates(const Group& g, int bound);

struct Witness {
    QMatrix matrix;
    QVector translation;
};

struct BlockIdentification {
    std::string name = "Unidentified";      // registry name
    std::optional<Mat2> conjugator;         // J when the match is J G J
    std::size_t index = 0;                  // PSL index of the positive part
    bool identified() const { return name != "Unidentified"; }
    std::string to_string() const;
};

struct ArithmeticBlock {
    std::vector<int> block_coordinates;
    std::vector<int> line_coordinates;
    BlockIdentification subgroup;  // Gamma_1: block parts extended by the identity
    SurfaceType block_surface;
    bool swap_in_finite_part = false;  // diag(Id, J) normalizes
    std::optional<Mat2> coupling;      // B0 for the swap elements
    std::string coupling_coset;        // identified coset of the swap block parts, or "Unidentified"
    std::optional<Mat2> coupling_conjugator;
    std::optional<BlockIdentification> union_subgroup;  // <Gamma_1, Gamma_2>
    std::optional<SurfaceType> union_surface;
    std::string involution_summary;
    bool involution_identity = false;
    bool involution_fixed_point = false;
};

struct NormalizerDescription {
    std::string group;
    int bound = 1;
    std::vector<QMatrix> finite_generators;
    std::vector<QMatrix> finite_elements;  // sorted
    std::vector<Witness> witnesses;        // one per finite generator
    std::optional<std::size_t> finite_order;
    std::optional<ArithmeticBlock> arithmetic_block;
    // rotation-block groups
    std::vector<int> rotation_block;
    std::string shape;  // A, B, C or empty
    bool bracket_only = false;
    std::string bracket_position;  // lower, upper, between
};

// Membership of X in the block part: diag(X, 1, 1) (or diag(X, J) with coupling) normalizes.
class BlockPredicate {
public:
    BlockPredicate(std::shared_ptr<const Group> group, std::vector<int> block, bool coupling);
    bool operator()(const Mat2& X) const;
    bool coupling() const { return coupling_; }
    const std::vector<int>& block() const { return block_; }
    QMatrix extend(const Mat2& X) const;

private:
    std::shared_ptr<const Group> group_;
    std::vector<int> block_, lines_;
    bool coupling_;
    std::shared_ptr<std::map<Mat2, bool>> cache_;
};

bool block_predicate_eval(const BlockPredicate& bp, const Mat2& X);
// registry match of the predicate up to conjugation by J, with an index check
BlockIdentification identify_block_subgroup(const BlockPredicate& bp);
BlockIdentification identify_predicate(const Predicate& p, std::size_t cap = 256);

NormalizerDescription normalizer_matrix_part(const Group& g, int bound = 1, int word_bound = 12);
NormalizerDescription normalizer_matrix_part(const BieberbachPresentation& p, int bound = 1, int word_bound = 12);
NormalizerDescription ctype_normalizer(const Group& g, int bound = 1);

// the group generated by a finite set of matrices
std::vector<QMatrix> generate_group(const std::vector<QMatrix>& generators, std::size_t cap = 4096);

// shapes and containment bounds for rotation-block groups
struct RotationShapes {
    std::map<std::string, std::vector<QMatrix>> lower;  // A / B or C
    std::vector<QMatrix> upper;
};
RotationShapes rotation_shapes(const Group& g, const std::vector<int>& rotation_block);
bool bracketed_group(const std::string& name);

}  // namespace flatmod
