#pragma once

#include <cstdint>
#include <compare>
#include <iosfwd>
#include <numeric>
#include <stdexcept>
#include <string>

namespace phikit {

// Exact rational on int64 with 128-bit intermediates. Any result that does not
// fit back into int64 throws instead of silently wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) { set(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return double(num_) / double(den_); }
    long double to_ldouble() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }

    std::string str() const;
    static Rational parse(const std::string& s);

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    void set(std::int64_t n, std::int64_t d);
    static Rational from128(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace phikit
