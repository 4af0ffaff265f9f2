#pragma once

#include "flatmod/errors.hpp"
#include "flatmod/rational.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace flatmod {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using QMatrix = Matrix<Rational>;
using QVector = Vector<Rational>;
using ZMatrix = Matrix<Integer>;
using ZVector = Vector<Integer>;

template <class S>
Matrix<S> identity(Eigen::Index n) {
    Matrix<S> I = Matrix<S>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) I(i, i) = S(1);
    return I;
}

template <class S>
Matrix<S> zeros(Eigen::Index r, Eigen::Index c) {
    return Matrix<S>::Zero(r, c);
}

template <class S>
Vector<S> zero_vector(Eigen::Index n) {
    return Vector<S>::Zero(n);
}

template <class S>
bool is_zero(const Matrix<S>& M) {
    for (Eigen::Index i = 0; i < M.size(); ++i)
        if (!(M.data()[i] == S(0))) return false;
    return true;
}

// Reduced row echelon form over a field. Returns the reduced matrix and pivot columns.
template <class S>
std::pair<Matrix<S>, std::vector<Eigen::Index>> rref(Matrix<S> M) {
    std::vector<Eigen::Index> pivots;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < M.cols() && r < M.rows(); ++c) {
        Eigen::Index p = r;
        while (p < M.rows() && M(p, c) == S(0)) ++p;
        if (p == M.rows()) continue;
        if (p != r) M.row(p).swap(M.row(r));
        S inv = S(1) / M(r, c);
        for (Eigen::Index j = c; j < M.cols(); ++j) M(r, j) *= inv;
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            if (i == r || M(i, c) == S(0)) continue;
            S f = M(i, c);
            for (Eigen::Index j = c; j < M.cols(); ++j) M(i, j) -= f * M(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(M), std::move(pivots)};
}

template <class S>
Eigen::Index rank(const Matrix<S>& M) {
    return static_cast<Eigen::Index>(rref(M).second.size());
}

// Basis of {x : M x = 0} as columns, one per free variable (canonical for a given M).
template <class S>
Matrix<S> nullspace(const Matrix<S>& M) {
    auto [R, piv] = rref(M);
    std::vector<Eigen::Index> free;
    for (Eigen::Index c = 0, k = 0; c < M.cols(); ++c) {
        if (k < static_cast<Eigen::Index>(piv.size()) && piv[k] == c) {
            ++k;
            continue;
        }
        free.push_back(c);
    }
    Matrix<S> N = Matrix<S>::Zero(M.cols(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t f = 0; f < free.size(); ++f) {
        N(free[f], f) = S(1);
        for (std::size_t i = 0; i < piv.size(); ++i) N(piv[i], f) = -R(i, free[f]);
    }
    return N;
}

template <class S>
S determinant(Matrix<S> M) {
    if (M.rows() != M.cols()) throw PreconditionViolated("determinant of a non-square matrix");
    S det(1);
    const Eigen::Index n = M.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && M(p, c) == S(0)) ++p;
        if (p == n) return S(0);
        if (p != c) {
            M.row(p).swap(M.row(c));
            det = -det;
        }
        det *= M(c, c);
        for (Eigen::Index i = c + 1; i < n; ++i) {
            if (M(i, c) == S(0)) continue;
            S f = M(i, c) / M(c, c);
            for (Eigen::Index j = c; j < n; ++j) M(i, j) -= f * M(c, j);
        }
    }
    return det;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& M) {
    const Eigen::Index n = M.rows();
    if (n != M.cols()) throw PreconditionViolated("inverse of a non-square matrix");
    Matrix<S> aug(n, 2 * n);
    aug << M, identity<S>(n);
    auto [R, piv] = rref(aug);
    if (static_cast<Eigen::Index>(piv.size()) < n || piv[n - 1] != n - 1)
        throw PreconditionViolated("matrix is singular");
    return R.rightCols(n);
}

// Canonical basis of the column span: nonzero rows of rref(B^T), returned as columns.
template <class S>
Matrix<S> column_span_basis(const Matrix<S>& B) {
    auto [R, piv] = rref<S>(B.transpose());
    return R.topRows(static_cast<Eigen::Index>(piv.size())).transpose();
}

// Solve B Y = C for Y when the columns of B are independent and C lies in their span.
template <class S>
Matrix<S> solve_in_span(const Matrix<S>& B, const Matrix<S>& C) {
    Matrix<S> aug(B.rows(), B.cols() + C.cols());
    aug << B, C;
    auto [R, piv] = rref(aug);
    if (static_cast<Eigen::Index>(piv.size()) != B.cols() || (!piv.empty() && piv.back() >= B.cols()))
        throw PreconditionViolated("right-hand side outside the column span");
    return R.topRightCorner(B.cols(), C.cols());
}

bool is_integral(const QMatrix& M);
Integer common_denominator(const QMatrix& M);
ZMatrix to_integer(const QMatrix& M);  // requires is_integral
QMatrix to_rational(const ZMatrix& M);

QMatrix qmatrix(std::initializer_list<std::initializer_list<Rational>> rows);
QVector qvector(std::initializer_list<Rational> entries);
QMatrix block_diagonal(const std::vector<QMatrix>& blocks);
QMatrix diag(std::initializer_list<Rational> entries);
QMatrix power(const QMatrix& M, int k);

// Strict weak order by shape, then entries in row-major order.
template <class S>
struct MatrixLess {
    bool operator()(const Matrix<S>& A, const Matrix<S>& B) const {
        if (A.rows() != B.rows()) return A.rows() < B.rows();
        if (A.cols() != B.cols()) return A.cols() < B.cols();
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                if (!(A(i, j) == B(i, j))) return A(i, j) < B(i, j);
        return false;
    }
};

std::string to_string(const QMatrix& M);
std::string to_string(const QVector& v);

}  // namespace flatmod
