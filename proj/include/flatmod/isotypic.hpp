#pragma once

#include "flatmod/affine.hpp"

#include <string>
#include <vector>

namespace flatmod {

enum class DivisionType { R, C, H };

std::string to_string(DivisionType k);
int real_dimension(DivisionType k);

struct IsotypicComponent {
    QMatrix basis;  // columns span the component
    int irreducible_dimension = 0;
    int multiplicity = 0;
    DivisionType division_type = DivisionType::R;

    int dimension() const { return static_cast<int>(basis.cols()); }
};

struct IsotypicDecomposition {
    std::vector<IsotypicComponent> components;
    Eigen::Index ambient_dimension = 0;

    // projection onto component i along the others
    QMatrix projection(std::size_t i) const;
    // index of the component containing v, if any
    std::optional<std::size_t> component_of(const QVector& v) const;
};

// basis of {X : X A = A X for every generator A}
std::vector<QMatrix> commutant(const std::vector<QMatrix>& generators);
std::vector<QMatrix> commutant(const HolonomyGroup& H);

// action of the generators on an invariant subspace, in the coordinates of its basis columns
std::vector<QMatrix> restrict_to(const std::vector<QMatrix>& generators, const QMatrix& basis);

IsotypicDecomposition isotypic_decomposition(const HolonomyGroup& H);
DivisionType classify_division_type(const IsotypicComponent& component, const HolonomyGroup& H);

struct TeichmullerFactor {
    int multiplicity = 1;
    DivisionType division_type = DivisionType::R;

    // real dimension of GL(m, K) / O(m, K)
    int dimension() const;
    std::string to_string() const;
    friend bool operator==(const TeichmullerFactor&, const TeichmullerFactor&) = default;
};

struct TeichmullerSpace {
    std::vector<TeichmullerFactor> factors;

    int dimension() const;
    std::string to_string() const;
};

TeichmullerSpace teichmuller_space(const IsotypicDecomposition& d);

}  // namespace flatmod
