#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

#include <compare>
#include <ostream>
#include <string>

namespace flatmod {

namespace mp = boost::multiprecision;

// Arbitrary precision integer. Kept as a thin value type so it can be an Eigen scalar.
class Integer {
public:
    using Rep = mp::number<mp::cpp_int_backend<>, mp::et_off>;

    Integer() = default;
    Integer(long long n) : v_(n) {}
    explicit Integer(Rep r) : v_(std::move(r)) {}

    const Rep& rep() const { return v_; }
    bool is_zero() const { return v_.is_zero(); }
    int sign() const { return v_.sign(); }
    long long to_ll() const;
    std::string str() const { return v_.str(); }

    friend Integer operator+(const Integer& a, const Integer& b) { return Integer(a.v_ + b.v_); }
    friend Integer operator-(const Integer& a, const Integer& b) { return Integer(a.v_ - b.v_); }
    friend Integer operator*(const Integer& a, const Integer& b) { return Integer(a.v_ * b.v_); }
    // truncating division, as for built-in integers
    friend Integer operator/(const Integer& a, const Integer& b) { return Integer(a.v_ / b.v_); }
    friend Integer operator%(const Integer& a, const Integer& b) { return Integer(a.v_ % b.v_); }
    Integer operator-() const { return Integer(-v_); }
    Integer& operator+=(const Integer& o) { v_ += o.v_; return *this; }
    Integer& operator-=(const Integer& o) { v_ -= o.v_; return *this; }
    Integer& operator*=(const Integer& o) { v_ *= o.v_; return *this; }
    Integer& operator/=(const Integer& o) { v_ /= o.v_; return *this; }

    friend bool operator==(const Integer& a, const Integer& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Integer& a, const Integer& b) {
        int c = a.v_.compare(b.v_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& o, const Integer& x) { return o << x.v_; }

private:
    Rep v_;
};

Integer abs(const Integer& x);
Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);
// floor division and the matching nonnegative remainder (b != 0)
Integer floor_div(const Integer& a, const Integer& b);
Integer floor_mod(const Integer& a, const Integer& b);

class Rational {
public:
    using Rep = mp::number<mp::cpp_rational_backend, mp::et_off>;

    Rational() = default;
    Rational(long long n) : v_(n) {}
    Rational(long long n, long long d);
    Rational(const Integer& n) : v_(n.rep()) {}
    Rational(const Integer& n, const Integer& d);
    explicit Rational(Rep r) : v_(std::move(r)) {}

    // accepts "p", "-p", "p/q"; throws std::invalid_argument
    static Rational parse(const std::string& s);

    const Rep& rep() const { return v_; }
    Integer numerator() const { return Integer(mp::numerator(v_)); }
    Integer denominator() const { return Integer(mp::denominator(v_)); }
    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return mp::denominator(v_) == 1; }
    int sign() const { return v_.sign(); }
    Integer floor() const;
    // x - floor(x), in [0, 1)
    Rational frac() const { return *this - Rational(floor()); }
    double to_double() const { return v_.convert_to<double>(); }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) { return Rational(a.v_ / b.v_); }
    Rational operator-() const { return Rational(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { v_ /= o.v_; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = a.v_.compare(b.v_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& o, const Rational& x) { return o << x.str(); }

private:
    Rep v_;
};

Rational abs(const Rational& x);

}  // namespace flatmod

namespace Eigen {

template <>
struct NumTraits<flatmod::Integer> : GenericNumTraits<flatmod::Integer> {
    using Real = flatmod::Integer;
    using NonInteger = flatmod::Rational;
    using Nested = flatmod::Integer;
    using Literal = flatmod::Integer;
    static constexpr int digits10() { return 0; }
    enum { IsComplex = 0, IsInteger = 1, IsSigned = 1, RequireInitialization = 1, ReadCost = 1, AddCost = 3, MulCost = 3 };
};

template <>
struct NumTraits<flatmod::Rational> : GenericNumTraits<flatmod::Rational> {
    using Real = flatmod::Rational;
    using NonInteger = flatmod::Rational;
    using Nested = flatmod::Rational;
    using Literal = flatmod::Rational;
    static constexpr int digits10() { return 0; }
    enum { IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1, ReadCost = 1, AddCost = 3, MulCost = 3 };
};

}  // namespace Eigen
