#include "flatmod/exact_core.hpp"

#include <algorithm>

namespace flatmod {

namespace {

using Idx = Eigen::Index;

void add_row_multiple(ZMatrix& A, Idx dst, Idx src, const Integer& q) {
    for (Idx j = 0; j < A.cols(); ++j) A(dst, j) -= q * A(src, j);
}

void add_col_multiple(ZMatrix& A, Idx dst, Idx src, const Integer& q) {
    for (Idx i = 0; i < A.rows(); ++i) A(i, dst) -= q * A(i, src);
}

struct Bezout {
    Integer g, x, y;
};

// g = x a + y b = gcd(a, b) with g > 0
Bezout extended_gcd(Integer a, Integer b) {
    Integer x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (!b.is_zero()) {
        const Integer q = a / b;
        Integer r = a - q * b;
        a = std::move(b);
        b = std::move(r);
        Integer nx = x0 - q * x1, ny = y0 - q * y1;
        x0 = std::move(x1), y0 = std::move(y1);
        x1 = std::move(nx), y1 = std::move(ny);
    }
    if (a.sign() < 0) return {-a, -x0, -y0};
    return {a, x0, y0};
}

// rows (s, i) <- [[x, y], [-b/g, a/g]] (rows s, i) with x a + y b = g, applied to A and its transform T
void combine_rows(ZMatrix& A, ZMatrix& T, Idx s, Idx i, Integer a, Integer b) {
    const auto [g, x, y] = extended_gcd(a, b);
    const Integer p = b / g, q = a / g;
    auto apply = [&](ZMatrix& X) {
        for (Idx j = 0; j < X.cols(); ++j) {
            const Integer u = X(s, j), v = X(i, j);
            X(s, j) = x * u + y * v;
            X(i, j) = q * v - p * u;
        }
    };
    apply(A);
    apply(T);
}

void combine_cols(ZMatrix& A, ZMatrix& T, Idx s, Idx j, Integer a, Integer b) {
    const auto [g, x, y] = extended_gcd(a, b);
    const Integer p = b / g, q = a / g;
    auto apply = [&](ZMatrix& X) {
        for (Idx i = 0; i < X.rows(); ++i) {
            const Integer u = X(i, s), v = X(i, j);
            X(i, s) = x * u + y * v;
            X(i, j) = q * v - p * u;
        }
    };
    apply(A);
    apply(T);
}

}  // namespace

SnfResult smith_normal_form(const ZMatrix& M) {
    const Idx m = M.rows(), n = M.cols();
    ZMatrix D = M;
    ZMatrix U = identity<Integer>(m);
    ZMatrix V = identity<Integer>(n);

    for (Idx t = 0; t < std::min(m, n); ++t) {
        // smallest nonzero entry of the trailing block, first in row-major order
        Idx pi = -1, pj = -1;
        for (Idx i = t; i < m; ++i)
            for (Idx j = t; j < n; ++j)
                if (!D(i, j).is_zero() && (pi < 0 || abs(D(i, j)) < abs(D(pi, pj)))) pi = i, pj = j;
        if (pi < 0) break;
        D.row(pi).swap(D.row(t));
        U.row(pi).swap(U.row(t));
        D.col(pj).swap(D.col(t));
        V.col(pj).swap(V.col(t));

        for (bool done = false; !done;) {
            done = true;
            // Bezout row steps keep the pivot equal to a gcd, so each entry is cleared in one pass
            for (Idx i = t + 1; i < m; ++i) {
                if (D(i, t).is_zero()) continue;
                if ((D(i, t) % D(t, t)).is_zero()) {
                    const Integer q = D(i, t) / D(t, t);
                    add_row_multiple(D, i, t, q);
                    add_row_multiple(U, i, t, q);
                    continue;
                }
                combine_rows(D, U, t, i, D(t, t), D(i, t));
                done = false;
            }
            for (Idx j = t + 1; j < n; ++j) {
                if (D(t, j).is_zero()) continue;
                if ((D(t, j) % D(t, t)).is_zero()) {
                    const Integer q = D(t, j) / D(t, t);
                    add_col_multiple(D, j, t, q);
                    add_col_multiple(V, j, t, q);
                    continue;
                }
                combine_cols(D, V, t, j, D(t, t), D(t, j));
                done = false;
            }
            if (!done) continue;
            // divisibility: fold an offending row into row t and go again
            for (Idx i = t + 1; i < m && done; ++i)
                for (Idx j = t + 1; j < n; ++j)
                    if (!(D(i, j) % D(t, t)).is_zero()) {
                        add_row_multiple(D, t, i, Integer(-1));
                        add_row_multiple(U, t, i, Integer(-1));
                        done = false;
                        break;
                    }
        }
        if (D(t, t).sign() < 0) {
            D.row(t) = -D.row(t);
            U.row(t) = -U.row(t);
        }
    }
    return {std::move(U), std::move(D), std::move(V)};
}

ZMatrix hermite_normal_form(const ZMatrix& M) {
    ZMatrix H = M;
    const Idx m = H.rows(), n = H.cols();
    Idx r = 0;
    for (Idx c = 0; c < n && r < m; ++c) {
        for (;;) {
            Idx p = -1;
            for (Idx i = r; i < m; ++i)
                if (!H(i, c).is_zero() && (p < 0 || abs(H(i, c)) < abs(H(p, c)))) p = i;
            if (p < 0) break;
            H.row(p).swap(H.row(r));
            bool clean = true;
            for (Idx i = r + 1; i < m; ++i) {
                if (H(i, c).is_zero()) continue;
                add_row_multiple(H, i, r, floor_div(H(i, c), H(r, c)));
                if (!H(i, c).is_zero()) clean = false;
            }
            if (clean) break;
        }
        if (H(r, c).is_zero()) continue;
        if (H(r, c).sign() < 0) H.row(r) = -H.row(r);
        for (Idx i = 0; i < r; ++i) add_row_multiple(H, i, r, floor_div(H(i, c), H(r, c)));
        ++r;
    }
    return H.topRows(r);
}

Lattice::Lattice(QMatrix hnf_basis) : basis_(std::move(hnf_basis)), inverse_(inverse(basis_)) {}

bool Lattice::contains(const QVector& v) const {
    if (v.size() != dimension()) throw PreconditionViolated("dimension mismatch in lattice membership");
    return is_integral(coordinates(v));
}

QVector Lattice::reduce(const QVector& v) const {
    QVector c = coordinates(v);
    for (Idx i = 0; i < c.size(); ++i) c(i) = c(i).frac();
    return basis_ * c;
}

bool Lattice::preserved_by(const QMatrix& X) const {
    QMatrix Y = inverse_ * X * basis_;
    if (!is_integral(Y)) return false;
    return abs(determinant(Y)) == Rational(1);
}

Lattice hnf_lattice(const std::vector<QVector>& vectors) {
    if (vectors.empty()) throw RankDeficient("empty generating set");
    const Idx n = vectors.front().size();
    QMatrix rows(static_cast<Idx>(vectors.size()), n);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != n) throw PreconditionViolated("generators of different dimensions");
        rows.row(static_cast<Idx>(i)) = vectors[i].transpose();
    }
    Integer den = common_denominator(rows);
    ZMatrix H = hermite_normal_form(to_integer(rows * Rational(den)));
    if (H.rows() < n) throw RankDeficient("generators span a sublattice of rank " + std::to_string(H.rows()));
    QMatrix basis = to_rational(H).transpose() / Rational(den);
    return Lattice(std::move(basis));
}

Lattice standard_lattice(Eigen::Index n) { return Lattice(identity<Rational>(n)); }

bool lattice_contains(const Lattice& L, const QVector& v) { return L.contains(v); }

std::optional<QVector> solve_mod_integers(const QMatrix& M, const QVector& c) {
    const Idx m = M.rows(), n = M.cols();
    if (c.size() != m) throw PreconditionViolated("dimension mismatch in congruence system");
    Integer den = common_denominator(M);
    SnfResult s = smith_normal_form(to_integer(M * Rational(den)));
    QVector u = to_rational(s.U) * c;
    QVector y = QVector::Zero(n);
    for (Idx i = 0; i < m; ++i) {
        const bool pivot = i < n && !s.D(i, i).is_zero();
        if (!pivot) {
            if (!u(i).is_integer()) return std::nullopt;
            continue;
        }
        y(i) = Rational(den) * u(i).frac() / Rational(s.D(i, i));
    }
    return QVector(to_rational(s.V) * y);
}

std::optional<QVector> solve_mod_lattice(const QMatrix& A, const QVector& w, const Lattice& L) {
    return solve_mod_lattice(std::vector<QMatrix>{A}, std::vector<QVector>{w}, L);
}

std::optional<QVector> solve_mod_lattice(const std::vector<QMatrix>& A, const std::vector<QVector>& w,
                                         const Lattice& L) {
    const Idx n = L.dimension();
    if (A.size() != w.size()) throw PreconditionViolated("unequal number of matrices and right-hand sides");
    if (A.empty()) return QVector(QVector::Zero(n));
    QMatrix M(n * static_cast<Idx>(A.size()), n);
    QVector c(n * static_cast<Idx>(A.size()));
    for (std::size_t k = 0; k < A.size(); ++k) {
        if (A[k].rows() != n || A[k].cols() != n || w[k].size() != n)
            throw PreconditionViolated("dimension mismatch in solve_mod_lattice");
        M.middleRows(static_cast<Idx>(k) * n, n) = L.basis_inverse() * A[k];
        c.segment(static_cast<Idx>(k) * n, n) = L.basis_inverse() * w[k];
    }
    return solve_mod_integers(M, c);
}

bool integer_solvable(const QMatrix& M, const QVector& b) {
    const Idx m = M.rows(), n = M.cols();
    if (b.size() != m) throw PreconditionViolated("dimension mismatch in integer_solvable");
    Integer den = lcm(common_denominator(M), common_denominator(QMatrix(b)));
    SnfResult s = smith_normal_form(to_integer(M * Rational(den)));
    ZVector ub = s.U * to_integer(QMatrix(b * Rational(den)));
    for (Idx i = 0; i < m; ++i) {
        if (i < n && !s.D(i, i).is_zero()) {
            if (!(ub(i) % s.D(i, i)).is_zero()) return false;
        } else if (!ub(i).is_zero()) {
            return false;
        }
    }
    return true;
}

}  // namespace flatmod
