#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <mpfr.h>

#include "phikit/rational.hpp"

namespace phikit {

// Closed interval with MPFR endpoints, rounded outward on every operation.
class Interval {
public:
    static constexpr mpfr_prec_t kPrec = 256;

    Interval();
    Interval(const Rational& r);
    Interval(long n) : Interval(Rational(n)) {}
    Interval(int n) : Interval(Rational(n)) {}
    Interval(const Interval& o);
    Interval& operator=(const Interval& o);
    ~Interval();

    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);  // throws if b contains 0
    friend Interval log(const Interval& a);    // natural log; throws unless a > 0
    friend Interval log2(const Interval& a);
    friend Interval sqrt(const Interval& a);

    long double lo_ld() const;
    long double hi_ld() const;
    // -1 if r < lo, +1 if r > hi, 0 if r lies inside
    int compare(const Rational& r) const;
    bool equals(const Rational& r) const;  // degenerate interval exactly at r
    std::string str() const;

private:
    mpfr_t lo_, hi_;
};

// The same bound expressed once as a generic lambda is evaluated in long
// double and, near ties, as an MPFR interval.
struct LogBound {
    std::function<long double()> approx;
    std::function<Interval()> interval;
};

enum class CmpResult { Holds, Fails, Undecided };
const char* cmp_name(CmpResult r);

struct CmpOutcome {
    CmpResult result;
    bool escalated;      // MPFR was needed
    long double rhs;     // long double value of the bound
};

// lhs >= bound, decided in long double with a 1e-9 margin, else in MPFR
CmpOutcome check_geq(const Rational& lhs, const LogBound& rhs);
CmpOutcome check_leq(const Rational& lhs, const LogBound& rhs);

template <class F>
LogBound make_bound(F f) {
    return LogBound{[f] { return static_cast<long double>(f(static_cast<long double>(0))); },
                    [f] { return f(Interval(0)); }};
}

// Numeric helpers that work for both long double and Interval
inline long double num_const(long double, const Rational& r) { return r.to_ldouble(); }
inline Interval num_const(const Interval&, const Rational& r) { return Interval(r); }

// c = √5 + 5, δ = (c - 3)/c, and the constant 2·log2(√13 + 1)
template <class N>
N const_c(N z) {
    using std::sqrt;
    return sqrt(num_const(z, 5)) + num_const(z, 5);
}
template <class N>
N const_delta(N z) {
    N c = const_c(z);
    return (c - num_const(z, 3)) / c;
}
template <class N>
N const_app(N z) {
    using std::log2;
    using std::sqrt;
    return num_const(z, 2) * log2(sqrt(num_const(z, 13)) + num_const(z, 1));
}
template <class N>
N log_base(N x, N base) {
    using std::log;
    return log(x) / log(base);
}

}  // namespace phikit
