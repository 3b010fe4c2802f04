#include "phikit/rational.hpp"

#include <ostream>

namespace phikit {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kMax = static_cast<__int128>(INT64_MAX);

}  // namespace

void Rational::set(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    *this = from128(n, d);
}

Rational Rational::from128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > kMax || n < -kMax || d > kMax) throw std::overflow_error("rational: int64 overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational::from128(static_cast<__int128>(a.num_) + b.num_, a.den_);
    return Rational::from128(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from128(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational: division by zero");
    return Rational::from128(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            auto dot = s.find('.');
            if (dot == std::string::npos) return Rational(std::stoll(s));
            // decimal literal, e.g. 1.25
            std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
            bool neg = !ip.empty() && ip[0] == '-';
            std::int64_t den = 1;
            for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
            std::int64_t whole = ip.empty() || ip == "-" ? 0 : std::stoll(ip);
            std::int64_t frac = fp.empty() ? 0 : std::stoll(fp);
            Rational r = Rational(whole < 0 ? -whole : whole) + Rational(frac, den);
            return neg ? -r : r;
        }
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("cannot parse rational '" + s + "'");
    }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace phikit
