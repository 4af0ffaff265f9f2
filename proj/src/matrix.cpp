#include "flatmod/matrix.hpp"

#include <sstream>

namespace flatmod {

bool is_integral(const QMatrix& M) {
    for (Eigen::Index i = 0; i < M.size(); ++i)
        if (!M.data()[i].is_integer()) return false;
    return true;
}

Integer common_denominator(const QMatrix& M) {
    Integer d(1);
    for (Eigen::Index i = 0; i < M.size(); ++i) d = lcm(d, M.data()[i].denominator());
    return d;
}

ZMatrix to_integer(const QMatrix& M) {
    ZMatrix Z(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (!M(i, j).is_integer()) throw PreconditionViolated("matrix entry is not an integer: " + M(i, j).str());
            Z(i, j) = M(i, j).numerator();
        }
    return Z;
}

QMatrix to_rational(const ZMatrix& M) {
    QMatrix Q(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) Q(i, j) = Rational(M(i, j));
    return Q;
}

QMatrix qmatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
    QMatrix M(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != c) throw PreconditionViolated("ragged matrix literal");
        Eigen::Index j = 0;
        for (const auto& x : row) M(i, j++) = x;
        ++i;
    }
    return M;
}

QVector qvector(std::initializer_list<Rational> entries) {
    QVector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (const auto& x : entries) v(i++) = x;
    return v;
}

QMatrix block_diagonal(const std::vector<QMatrix>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    QMatrix M = QMatrix::Zero(n, n);
    Eigen::Index o = 0;
    for (const auto& b : blocks) {
        M.block(o, o, b.rows(), b.cols()) = b;
        o += b.rows();
    }
    return M;
}

QMatrix diag(std::initializer_list<Rational> entries) {
    const auto n = static_cast<Eigen::Index>(entries.size());
    QMatrix M = QMatrix::Zero(n, n);
    Eigen::Index i = 0;
    for (const auto& x : entries) M(i, i) = x, ++i;
    return M;
}

QMatrix power(const QMatrix& M, int k) {
    QMatrix out = identity<Rational>(M.rows());
    for (int i = 0; i < k; ++i) out = out * M;
    return out;
}

std::string to_string(const QMatrix& M) {
    std::ostringstream os;
    os << '[';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        os << (i ? ",[" : "[");
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << M(i, j).str();
        os << ']';
    }
    os << ']';
    return os.str();
}

std::string to_string(const QVector& v) {
    std::ostringstream os;
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i).str();
    os << ')';
    return os.str();
}

}  // namespace flatmod
