#include "phikit/logcmp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace phikit {

namespace {

void set_rational(mpfr_t out, const Rational& r, mpfr_rnd_t rnd) {
    mpfr_t n, d;
    mpfr_init2(n, Interval::kPrec);
    mpfr_init2(d, Interval::kPrec);
    mpfr_set_si(n, r.num(), MPFR_RNDN);  // exact, int64 fits in 256 bits
    mpfr_set_si(d, r.den(), MPFR_RNDN);
    mpfr_div(out, n, d, rnd);
    mpfr_clear(n);
    mpfr_clear(d);
}

}  // namespace

Interval::Interval() {
    mpfr_init2(lo_, kPrec);
    mpfr_init2(hi_, kPrec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Rational& r) {
    mpfr_init2(lo_, kPrec);
    mpfr_init2(hi_, kPrec);
    set_rational(lo_, r, MPFR_RNDD);
    set_rational(hi_, r, MPFR_RNDU);
}

Interval::Interval(const Interval& o) {
    mpfr_init2(lo_, kPrec);
    mpfr_init2(hi_, kPrec);
    mpfr_set(lo_, o.lo_, MPFR_RNDN);
    mpfr_set(hi_, o.hi_, MPFR_RNDN);
}

Interval& Interval::operator=(const Interval& o) {
    if (this != &o) {
        mpfr_set(lo_, o.lo_, MPFR_RNDN);
        mpfr_set(hi_, o.hi_, MPFR_RNDN);
    }
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_t t;
    mpfr_init2(t, Interval::kPrec);
    const mpfr_t* as[2] = {&a.lo_, &a.hi_};
    const mpfr_t* bs[2] = {&b.lo_, &b.hi_};
    bool first = true;
    for (auto x : as)
        for (auto y : bs) {
            mpfr_mul(t, *x, *y, MPFR_RNDD);
            if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDN);
            mpfr_mul(t, *x, *y, MPFR_RNDU);
            if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDN);
            first = false;
        }
    mpfr_clear(t);
    return r;
}

Interval operator/(const Interval& a, const Interval& b) {
    if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) throw std::domain_error("interval division by a range containing 0");
    Interval inv;
    mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
    mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
    return a * inv;
}

Interval log(const Interval& a) {
    if (mpfr_sgn(a.lo_) <= 0) throw std::domain_error("interval log of a non-positive range");
    Interval r;
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

Interval log2(const Interval& a) {
    if (mpfr_sgn(a.lo_) <= 0) throw std::domain_error("interval log2 of a non-positive range");
    Interval r;
    mpfr_log2(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log2(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

Interval sqrt(const Interval& a) {
    if (mpfr_sgn(a.lo_) < 0) throw std::domain_error("interval sqrt of a negative range");
    Interval r;
    mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

long double Interval::lo_ld() const { return mpfr_get_ld(lo_, MPFR_RNDD); }
long double Interval::hi_ld() const { return mpfr_get_ld(hi_, MPFR_RNDU); }

int Interval::compare(const Rational& r) const {
    mpfr_t x;
    mpfr_init2(x, kPrec);
    // r is exact at this precision only if its binary expansion terminates, so test both roundings
    set_rational(x, r, MPFR_RNDD);
    int out = 0;
    if (mpfr_greater_p(x, hi_)) out = 1;
    set_rational(x, r, MPFR_RNDU);
    if (mpfr_less_p(x, lo_)) out = -1;
    mpfr_clear(x);
    return out;
}

bool Interval::equals(const Rational& r) const {
    if (!mpfr_equal_p(lo_, hi_)) return false;
    mpfr_t x, y;
    mpfr_init2(x, kPrec);
    mpfr_init2(y, kPrec);
    set_rational(x, r, MPFR_RNDD);
    set_rational(y, r, MPFR_RNDU);
    bool eq = mpfr_equal_p(x, y) && mpfr_equal_p(x, lo_);
    mpfr_clear(x);
    mpfr_clear(y);
    return eq;
}

std::string Interval::str() const {
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "[%.25Rg, %.25Rg]", lo_, hi_);
    return buf;
}

const char* cmp_name(CmpResult r) {
    switch (r) {
        case CmpResult::Holds: return "holds";
        case CmpResult::Fails: return "fails";
        case CmpResult::Undecided: return "undecided";
    }
    return "?";
}

CmpOutcome check_geq(const Rational& lhs, const LogBound& rhs) {
    constexpr long double margin = 1e-9L;
    long double r = rhs.approx();
    long double l = lhs.to_ldouble();
    if (l - r > margin) return {CmpResult::Holds, false, r};
    if (r - l > margin) return {CmpResult::Fails, false, r};
    Interval iv = rhs.interval();
    if (iv.equals(lhs)) return {CmpResult::Holds, true, r};
    int c = iv.compare(lhs);
    if (c > 0) return {CmpResult::Holds, true, r};
    if (c < 0) return {CmpResult::Fails, true, r};
    return {CmpResult::Undecided, true, r};
}

CmpOutcome check_leq(const Rational& lhs, const LogBound& rhs) {
    constexpr long double margin = 1e-9L;
    long double r = rhs.approx();
    long double l = lhs.to_ldouble();
    if (r - l > margin) return {CmpResult::Holds, false, r};
    if (l - r > margin) return {CmpResult::Fails, false, r};
    Interval iv = rhs.interval();
    if (iv.equals(lhs)) return {CmpResult::Holds, true, r};
    int c = iv.compare(lhs);
    if (c < 0) return {CmpResult::Holds, true, r};
    if (c > 0) return {CmpResult::Fails, true, r};
    return {CmpResult::Undecided, true, r};
}

}  // namespace phikit
