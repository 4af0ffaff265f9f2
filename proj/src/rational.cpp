#include "flatmod/rational.hpp"

#include <limits>
#include <stdexcept>

namespace flatmod {

long long Integer::to_ll() const {
    if (v_ > std::numeric_limits<long long>::max() || v_ < std::numeric_limits<long long>::min())
        throw std::overflow_error("integer does not fit in 64 bits: " + v_.str());
    return v_.convert_to<long long>();
}

Integer abs(const Integer& x) { return x.sign() < 0 ? -x : x; }

Integer gcd(const Integer& a, const Integer& b) { return Integer(mp::gcd(a.rep(), b.rep())); }

Integer lcm(const Integer& a, const Integer& b) {
    if (a.is_zero() || b.is_zero()) return Integer(0);
    return abs(a / gcd(a, b) * b);
}

Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    Integer r = a - q * b;
    if (!r.is_zero() && (r.sign() < 0) != (b.sign() < 0)) q -= 1;
    return q;
}

Integer floor_mod(const Integer& a, const Integer& b) {
    Integer r = a - floor_div(a, b) * b;
    return r.sign() < 0 ? r + abs(b) : r;
}

Rational::Rational(long long n, long long d) {
    if (d == 0) throw std::domain_error("zero denominator");
    v_ = Rep(n) / Rep(d);
}

Rational::Rational(const Integer& n, const Integer& d) {
    if (d.is_zero()) throw std::domain_error("zero denominator");
    v_ = Rep(n.rep()) / Rep(d.rep());
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    auto parse_int = [&](const std::string& t) {
        std::size_t i = 0;
        if (i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
        if (i == t.size()) throw std::invalid_argument("not a rational: '" + s + "'");
        for (std::size_t j = i; j < t.size(); ++j)
            if (t[j] < '0' || t[j] > '9') throw std::invalid_argument("not a rational: '" + s + "'");
        return Integer::Rep(t[0] == '+' ? t.substr(1) : t);
    };
    if (slash == std::string::npos) return Rational(Rep(parse_int(s)));
    Integer::Rep num = parse_int(s.substr(0, slash));
    Integer::Rep den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(Rep(num) / Rep(den));
}

Integer Rational::floor() const { return floor_div(numerator(), denominator()); }

std::string Rational::str() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }

}  // namespace flatmod
