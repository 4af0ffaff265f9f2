#pragma once

#include "flatmod/errors.hpp"
#include "flatmod/matrix.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flatmod {

// [[a, b], [c, d]] with det = +-1
struct Mat2 {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    std::int64_t det() const { return a * d - b * c; }
    std::int64_t trace() const { return a + d; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }
    Mat2 inverse() const;
    bool is_plus_minus_identity() const { return b == 0 && c == 0 && a == d && (a == 1 || a == -1); }
    std::string str() const;
    friend bool operator==(const Mat2&, const Mat2&) = default;
    friend auto operator<=>(const Mat2&, const Mat2&) = default;
};

using SL2Element = Mat2;

namespace sl2 {
inline constexpr Mat2 Id{1, 0, 0, 1};
inline constexpr Mat2 S{0, -1, 1, 0};
inline constexpr Mat2 T{1, 1, 0, 1};
inline constexpr Mat2 Tinv{1, -1, 0, 1};
inline constexpr Mat2 Y{0, -1, 1, 0};
inline constexpr Mat2 J{0, 1, 1, 0};
}  // namespace sl2

Mat2 to_mat2(const QMatrix& M);  // requires an integral 2x2 matrix
QMatrix to_qmatrix(const Mat2& m);
// representative of {m, -m, m^-1, -m^-1}
Mat2 canonical_up_to_sign_and_inverse(const Mat2& m);

using Predicate = std::function<bool(const Mat2&)>;

struct SubgroupSpec {
    std::string name;
    Predicate predicate;  // defined on det +-1 matrices
    bool is_group = true;

    bool contains(const Mat2& g) const { return predicate(g); }
    bool contains_minus_identity() const { return predicate(-sl2::Id); }
};

// Registry names: GL2Z, Gamma(2), Gamma0(2)^t, Gamma0(4), Gamma(2)Y and the coset Gamma_2(4).
// Aliases: sl2, gl2z, gamma_2, gamma0_2t, gamma0_4, gamma_2y, gamma2_4.
SubgroupSpec subgroup_spec(const std::string& name);
std::vector<SubgroupSpec> registry();  // the five groups, coset excluded
bool membership(const std::string& name, const Mat2& g);

struct CosetTable {
    std::vector<Mat2> representatives;  // in SL(2,Z); representative 0 is Id
    std::vector<std::string> words;     // S, T, t = T^-1; "Id" for the identity
    std::vector<std::size_t> perm_S, perm_T;
    std::vector<std::size_t> psl_class;  // coset index -> PSL class index
    std::size_t psl_count = 0;

    std::size_t index() const { return representatives.size(); }
};

// right cosets Gamma r of the positive part; r_i r_j^-1 in Gamma decides identity
CosetTable coset_enumeration(const SubgroupSpec& spec, std::size_t cap = 256);
// table for a caller-chosen complete system of representatives
CosetTable coset_table_from(const SubgroupSpec& spec, const std::vector<Mat2>& representatives);
// {h g} for h in inner (Gamma' \ Gamma) and g in outer (Gamma \ SL)
std::vector<Mat2> compose_representatives(const std::vector<Mat2>& inner, const std::vector<Mat2>& outer);
std::optional<std::size_t> coset_of(const CosetTable& t, const SubgroupSpec& spec, const Mat2& g);

std::size_t cusp_count(const CosetTable& t, const SubgroupSpec& spec);
std::pair<std::size_t, std::size_t> elliptic_counts(const CosetTable& t, const SubgroupSpec& spec);

struct SurfaceType {
    int genus = 0;
    int cusp_count = 0;
    std::vector<int> cone_points;
    std::string underlying_name;
    std::size_t psl_index = 0;

    Rational orbifold_euler_characteristic() const;
    std::string to_string() const;
    friend bool operator==(const SurfaceType&, const SurfaceType&) = default;
};

SurfaceType surface_classification(const CosetTable& t, const SubgroupSpec& spec);
SurfaceType classify_surface(const SubgroupSpec& spec, std::size_t cap = 256);

enum class Edge { Left, Right, ArcLeft, ArcRight };
std::string to_string(Edge e);

struct EdgePairing {
    std::size_t tile;
    Edge edge;
    std::size_t other_tile;
    Edge other_edge;
    Mat2 gamma;  // maps (other_tile, other_edge) onto (tile, edge)
};

struct FundamentalDomain {
    std::vector<std::pair<std::size_t, Mat2>> tiles;
    std::vector<std::string> labels;
    std::vector<EdgePairing> edge_pairings;  // one entry per matched pair of boundary edges

    std::vector<Mat2> pairing_matrices() const;
};

FundamentalDomain fundamental_domain(const CosetTable& t, const SubgroupSpec& spec);

// a point of P^1(Q); q = 0 encodes infinity
struct Cusp {
    std::int64_t p = 1, q = 0;
    bool is_infinity() const { return q == 0; }
    std::string str() const;
    friend bool operator==(const Cusp&, const Cusp&) = default;
};

Cusp make_cusp(std::int64_t p, std::int64_t q);
Cusp mobius(const Mat2& g, const Cusp& x);
std::complex<double> mobius(const Mat2& g, std::complex<double> z);

struct HalfPlaneCoordinates {
    double scale = 1;
    std::complex<double> z;
    QMatrix exact_form;
};

HalfPlaneCoordinates halfplane_coordinates(const QMatrix& G);

enum class MotionKind { Identity, Elliptic, Parabolic, Hyperbolic, OrientationReversing };
std::string to_string(MotionKind k);
MotionKind classify_motion(const Mat2& m);

struct EllipticWitness {
    Mat2 gamma;
    std::string word;
    Mat2 delta;  // gamma B0
    std::complex<double> fixed_point;
};

struct InvolutionReport {
    Mat2 b0;
    std::size_t elements_examined = 0;
    std::optional<std::pair<Mat2, std::string>> identity_inducing;  // gamma with gamma B0 = +-Id
    std::vector<EllipticWitness> elliptic;
    std::size_t parabolic = 0, hyperbolic = 0, orientation_reversing = 0;

    bool fixed_point_found() const { return identity_inducing.has_value() || !elliptic.empty(); }
    std::string summary() const;
};

InvolutionReport involution_analysis(const Mat2& b0, const SubgroupSpec& spec, int word_bound = 12);

// tiled domain in the window [-1.6, 1.6] x (0, 2.2] on an 800 x 550 canvas
std::string render_svg(const FundamentalDomain& fd, const std::string& title);

}  // namespace flatmod
