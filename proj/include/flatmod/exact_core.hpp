#pragma once

#include "flatmod/matrix.hpp"

#include <optional>
#include <vector>

namespace flatmod {

// U * M * V = D with D diagonal, nonnegative, d1 | d2 | ...
struct SnfResult {
    ZMatrix U;
    ZMatrix D;
    ZMatrix V;
};

SnfResult smith_normal_form(const ZMatrix& M);

// Row Hermite normal form: upper echelon, positive pivots, entries above a pivot reduced into [0, pivot).
// Zero rows are dropped.
ZMatrix hermite_normal_form(const ZMatrix& M);

// Full-rank lattice in Q^n. The basis (columns) is the HNF of the generators, so equal lattices
// compare equal entrywise.
class Lattice {
public:
    Lattice() = default;
    explicit Lattice(QMatrix hnf_basis);

    Eigen::Index dimension() const { return basis_.rows(); }
    const QMatrix& basis() const { return basis_; }
    const QMatrix& basis_inverse() const { return inverse_; }

    bool contains(const QVector& v) const;
    QVector coordinates(const QVector& v) const { return inverse_ * v; }
    // representative of v + L with lattice coordinates in [0, 1)
    QVector reduce(const QVector& v) const;
    // X L = L
    bool preserved_by(const QMatrix& X) const;

    friend bool operator==(const Lattice& a, const Lattice& b) { return a.basis_ == b.basis_; }

private:
    QMatrix basis_;
    QMatrix inverse_;
};

Lattice hnf_lattice(const std::vector<QVector>& vectors);
Lattice standard_lattice(Eigen::Index n);
bool lattice_contains(const Lattice& L, const QVector& v);

// Some rational x with M x - c in Z^m, or nothing. The solution is the SNF-coordinate representative
// with components reduced into [0, d_i).
std::optional<QVector> solve_mod_integers(const QMatrix& M, const QVector& c);

// A x = w (mod L)
std::optional<QVector> solve_mod_lattice(const QMatrix& A, const QVector& w, const Lattice& L);
// A_i x = w_i (mod L) for all i simultaneously
std::optional<QVector> solve_mod_lattice(const std::vector<QMatrix>& A, const std::vector<QVector>& w,
                                         const Lattice& L);

// exists integer z with M z = b
bool integer_solvable(const QMatrix& M, const QVector& b);

}  // namespace flatmod
