#include "flatmod/isotypic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace flatmod {

namespace {

using Idx = Eigen::Index;

QMatrix unflatten(const QMatrix& col, Idx n) {
    QMatrix X(n, n);
    for (Idx i = 0; i < n; ++i)
        for (Idx j = 0; j < n; ++j) X(i, j) = col(i * n + j, 0);
    return X;
}

QVector flatten(const QMatrix& X) {
    QVector v(X.size());
    for (Idx i = 0; i < X.rows(); ++i)
        for (Idx j = 0; j < X.cols(); ++j) v(i * X.cols() + j) = X(i, j);
    return v;
}

// basis of {sum l_k B_k : it commutes with every element of `with`}
std::vector<QMatrix> centralizer_within(const std::vector<QMatrix>& B, const std::vector<QMatrix>& with) {
    if (B.empty()) return {};
    const Idx n = B.front().rows();
    const Idx nn = n * n;
    QMatrix sys = QMatrix::Zero(nn * static_cast<Idx>(with.size()), static_cast<Idx>(B.size()));
    for (std::size_t w = 0; w < with.size(); ++w)
        for (std::size_t k = 0; k < B.size(); ++k)
            sys.block(static_cast<Idx>(w) * nn, static_cast<Idx>(k), nn, 1) =
                flatten(B[k] * with[w] - with[w] * B[k]);
    QMatrix N = nullspace(sys);
    std::vector<QMatrix> out;
    for (Idx c = 0; c < N.cols(); ++c) {
        QMatrix X = QMatrix::Zero(n, n);
        for (std::size_t k = 0; k < B.size(); ++k) X += B[k] * N(static_cast<Idx>(k), c);
        out.push_back(std::move(X));
    }
    return out;
}

// monic minimal polynomial, coefficients low to high
std::vector<Rational> minimal_polynomial(const QMatrix& Z) {
    const Idx n = Z.rows();
    std::vector<QVector> powers{flatten(identity<Rational>(n))};
    QMatrix P = identity<Rational>(n);
    for (Idx k = 1; k <= n; ++k) {
        P = P * Z;
        QMatrix span(n * n, k);
        for (Idx j = 0; j < k; ++j) span.col(j) = powers[static_cast<std::size_t>(j)];
        QMatrix target = flatten(P);
        if (rank(span) == rank(QMatrix((QMatrix(n * n, k + 1) << span, target).finished()))) {
            QMatrix c = solve_in_span(span, target);
            std::vector<Rational> poly;
            for (Idx j = 0; j < k; ++j) poly.push_back(-c(j, 0));
            poly.push_back(Rational(1));
            return poly;
        }
        powers.push_back(flatten(P));
    }
    throw InconsistentInvariants("minimal polynomial of degree above the matrix size");
}

QMatrix evaluate(const std::vector<Rational>& poly, const QMatrix& Z) {
    QMatrix acc = QMatrix::Zero(Z.rows(), Z.cols());
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = QMatrix(acc * Z) + identity<Rational>(Z.rows()) * *it;
    return acc;
}

std::vector<Integer> divisors(Integer a) {
    a = abs(a);
    std::vector<Integer> out;
    long long v = a.to_ll();
    for (long long d = 1; d * d <= v; ++d)
        if (v % d == 0) {
            out.push_back(Integer(d));
            if (d * d != v) out.push_back(Integer(v / d));
        }
    return out;
}

std::vector<Rational> rational_roots(const std::vector<Rational>& poly) {
    std::vector<Rational> roots;
    Integer den(1);
    for (const auto& c : poly) den = lcm(den, c.denominator());
    std::vector<Integer> a;
    for (const auto& c : poly) a.push_back((c * Rational(den)).numerator());
    std::size_t lo = 0;
    while (lo < a.size() && a[lo].is_zero()) ++lo;
    if (lo > 0) roots.push_back(Rational(0));
    if (lo + 1 >= a.size()) return roots;
    auto value = [&](const Rational& x) {
        Rational acc(0);
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    for (const auto& p : divisors(a[lo]))
        for (const auto& q : divisors(a.back()))
            for (int s : {1, -1}) {
                Rational r = Rational(p * Integer(s), q);
                if (value(r).is_zero() && std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
            }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<Rational> divide_linear(const std::vector<Rational>& poly, const Rational& r) {
    // poly / (x - r), exact
    std::vector<Rational> q(poly.size() - 1);
    Rational carry(0);
    for (std::size_t i = poly.size() - 1; i-- > 0;) {
        carry = poly[i + 1] + carry * r;
        q[i] = carry;
    }
    return q;
}

// split the subspace spanned by W (columns) along the primary decomposition of z restricted to it
std::vector<QMatrix> split(const QMatrix& W, const QMatrix& z) {
    QMatrix Z = solve_in_span(W, QMatrix(z * W));
    std::vector<Rational> poly = minimal_polynomial(Z);
    if (poly.size() == 2) return {W};
    std::vector<QMatrix> pieces;
    Idx covered = 0;
    std::vector<Rational> rest = poly;
    for (const auto& r : rational_roots(poly)) {
        QMatrix K = nullspace(QMatrix(Z - identity<Rational>(Z.rows()) * r));
        covered += K.cols();
        pieces.push_back(column_span_basis(QMatrix(W * K)));
        rest = divide_linear(rest, r);
    }
    if (rest.size() > 1) {
        QMatrix K = nullspace(evaluate(rest, Z));
        covered += K.cols();
        pieces.push_back(column_span_basis(QMatrix(W * K)));
    }
    if (covered != W.cols()) throw IrrationalSplit("central element is not semisimple on a rational subspace");
    return pieces;
}

struct Classification {
    DivisionType type;
    int multiplicity;
    int irreducible_dimension;
};

bool negative_definite(const QMatrix& G) {
    QMatrix M = -G;
    for (Idx k = 1; k <= M.rows(); ++k)
        if (determinant(QMatrix(M.topLeftCorner(k, k))) <= Rational(0)) return false;
    return true;
}

// the commutant restricted to a 4-dimensional block is a division algebra over R
bool quaternionic(const std::vector<QMatrix>& C) {
    const Idx d = C.front().rows();
    QMatrix traces(1, static_cast<Idx>(C.size()));
    for (std::size_t k = 0; k < C.size(); ++k) traces(0, static_cast<Idx>(k)) = C[k].trace();
    QMatrix N = nullspace(traces);
    std::vector<QMatrix> A0;
    for (Idx c = 0; c < N.cols(); ++c) {
        QMatrix X = QMatrix::Zero(d, d);
        for (std::size_t k = 0; k < C.size(); ++k) X += C[k] * N(static_cast<Idx>(k), c);
        A0.push_back(X);
    }
    QMatrix G(static_cast<Idx>(A0.size()), static_cast<Idx>(A0.size()));
    for (std::size_t i = 0; i < A0.size(); ++i)
        for (std::size_t j = 0; j < A0.size(); ++j) {
            QMatrix S = A0[i] * A0[j] + A0[j] * A0[i];
            if (S != identity<Rational>(d) * S(0, 0)) return false;
            G(static_cast<Idx>(i), static_cast<Idx>(j)) = S(0, 0) / Rational(2);
        }
    return negative_definite(G);
}

Classification classify(const std::vector<QMatrix>& restricted) {
    const int dim = static_cast<int>(restricted.front().rows());
    std::vector<QMatrix> C = commutant(restricted);
    std::vector<QMatrix> Z = centralizer_within(C, C);
    const int c = static_cast<int>(C.size());
    if (Z.size() == 1) {
        if (dim == 4 && c == 4 && quaternionic(C)) return {DivisionType::H, 1, 4};
        int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(c))));
        if (m * m == c && m > 0 && dim % m == 0) return {DivisionType::R, m, dim / m};
        throw UnclassifiableComponent("commutant of dimension " + std::to_string(c) + " on a block of dimension " +
                                      std::to_string(dim));
    }
    if (Z.size() == 2) {
        const QMatrix& z = Z[0] == identity<Rational>(dim) * Z[0](0, 0) ? Z[1] : Z[0];
        std::vector<Rational> p = minimal_polynomial(z);
        if (p.size() == 3 && p[1] * p[1] - Rational(4) * p[0] < Rational(0)) {
            int m = static_cast<int>(std::lround(std::sqrt(c / 2.0)));
            if (2 * m * m == c && m > 0 && dim % m == 0) return {DivisionType::C, m, dim / m};
            throw UnclassifiableComponent("complex-type block with commutant dimension " + std::to_string(c));
        }
        throw IrrationalSplit("isotypic splitting requires irrational idempotents");
    }
    throw IrrationalSplit("center of the commutant of dimension " + std::to_string(Z.size()) +
                          " could not be split over the rationals");
}

}  // namespace

std::string to_string(DivisionType k) {
    switch (k) {
        case DivisionType::R: return "R";
        case DivisionType::C: return "C";
        case DivisionType::H: return "H";
    }
    return "?";
}

int real_dimension(DivisionType k) {
    switch (k) {
        case DivisionType::R: return 1;
        case DivisionType::C: return 2;
        case DivisionType::H: return 4;
    }
    return 0;
}

std::vector<QMatrix> commutant(const std::vector<QMatrix>& generators) {
    if (generators.empty()) throw PreconditionViolated("commutant of an empty generator list");
    const Idx n = generators.front().rows();
    const Idx nn = n * n;
    QMatrix sys = QMatrix::Zero(nn * static_cast<Idx>(generators.size()), nn);
    for (std::size_t g = 0; g < generators.size(); ++g) {
        const QMatrix& A = generators[g];
        const Idx off = static_cast<Idx>(g) * nn;
        // (X A - A X)(r, c)
        for (Idx r = 0; r < n; ++r)
            for (Idx c = 0; c < n; ++c)
                for (Idx k = 0; k < n; ++k) {
                    sys(off + r * n + c, r * n + k) += A(k, c);
                    sys(off + r * n + c, k * n + c) -= A(r, k);
                }
    }
    QMatrix N = nullspace(sys);
    std::vector<QMatrix> out;
    for (Idx c = 0; c < N.cols(); ++c) out.push_back(unflatten(N.col(c), n));
    return out;
}

std::vector<QMatrix> commutant(const HolonomyGroup& H) { return commutant(H.generators); }

std::vector<QMatrix> restrict_to(const std::vector<QMatrix>& generators, const QMatrix& basis) {
    std::vector<QMatrix> out;
    for (const auto& A : generators) out.push_back(solve_in_span(basis, QMatrix(A * basis)));
    return out;
}

IsotypicDecomposition isotypic_decomposition(const HolonomyGroup& H) {
    const Idx n = H.generators.front().rows();
    std::vector<QMatrix> C = commutant(H);
    std::vector<QMatrix> Z = centralizer_within(C, C);
    std::vector<QMatrix> pieces{identity<Rational>(n)};
    for (const auto& z : Z) {
        std::vector<QMatrix> next;
        for (const auto& W : pieces)
            for (auto& P : split(W, z)) next.push_back(std::move(P));
        pieces = std::move(next);
    }
    IsotypicDecomposition D;
    D.ambient_dimension = n;
    for (const auto& W : pieces) {
        IsotypicComponent comp;
        comp.basis = W;
        Classification k = classify(restrict_to(H.generators, W));
        comp.division_type = k.type;
        comp.multiplicity = k.multiplicity;
        comp.irreducible_dimension = k.irreducible_dimension;
        D.components.push_back(std::move(comp));
    }
    std::sort(D.components.begin(), D.components.end(), [](const auto& a, const auto& b) {
        if (a.dimension() != b.dimension()) return a.dimension() < b.dimension();
        return MatrixLess<Rational>{}(QMatrix(a.basis.transpose()), QMatrix(b.basis.transpose()));
    });
    return D;
}

DivisionType classify_division_type(const IsotypicComponent& component, const HolonomyGroup& H) {
    return classify(restrict_to(H.generators, component.basis)).type;
}

QMatrix IsotypicDecomposition::projection(std::size_t i) const {
    QMatrix M(ambient_dimension, ambient_dimension);
    QMatrix E = QMatrix::Zero(ambient_dimension, ambient_dimension);
    Idx o = 0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& b = components[k].basis;
        M.middleCols(o, b.cols()) = b;
        if (k == i)
            for (Idx j = 0; j < b.cols(); ++j) E(o + j, o + j) = Rational(1);
        o += b.cols();
    }
    return M * E * inverse(M);
}

std::optional<std::size_t> IsotypicDecomposition::component_of(const QVector& v) const {
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& b = components[k].basis;
        QMatrix aug(b.rows(), b.cols() + 1);
        aug << b, v;
        if (rank(aug) == b.cols()) return k;
    }
    return std::nullopt;
}

int TeichmullerFactor::dimension() const {
    const int m = multiplicity;
    switch (division_type) {
        case DivisionType::R: return m * (m + 1) / 2;
        case DivisionType::C: return m * m;
        case DivisionType::H: return m * (2 * m - 1);
    }
    return 0;
}

std::string TeichmullerFactor::to_string() const {
    const std::string m = std::to_string(multiplicity);
    switch (division_type) {
        case DivisionType::R: return "GL(" + m + ",R)/O(" + m + ")";
        case DivisionType::C: return "GL(" + m + ",C)/U(" + m + ")";
        case DivisionType::H: return "GL(" + m + ",H)/Sp(" + m + ")";
    }
    return "?";
}

int TeichmullerSpace::dimension() const {
    int d = 0;
    for (const auto& f : factors) d += f.dimension();
    return d;
}

std::string TeichmullerSpace::to_string() const {
    std::string s;
    for (const auto& f : factors) s += (s.empty() ? "" : " x ") + f.to_string();
    return s;
}

TeichmullerSpace teichmuller_space(const IsotypicDecomposition& d) {
    TeichmullerSpace T;
    for (const auto& c : d.components) T.factors.push_back({c.multiplicity, c.division_type});
    return T;
}

}  // namespace flatmod
