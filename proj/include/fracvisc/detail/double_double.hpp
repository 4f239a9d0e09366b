#ifndef FRACVISC_DETAIL_DOUBLE_DOUBLE_HPP
#define FRACVISC_DETAIL_DOUBLE_DOUBLE_HPP

// Compensated double-double arithmetic (~31 significant decimal digits).
// Used internally by the Mittag-Leffler power series, where alternating
// terms can exceed the sum by many orders of magnitude and plain double
// accumulation would lose most of the accuracy budget.
//
// The algorithms are the classical error-free transformations (two_sum,
// two_prod via FMA) and the exp/log/Stirling recipes of the QD library
// family, restricted to what this project needs: positive arguments,
// moderate magnitudes.

#include <cmath>
#include <limits>

namespace fracvisc::detail {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// requires |a| >= |b|
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator+(dd a, double b) {
    dd s = two_sum(a.hi, b);
    s.lo += a.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator+(double a, dd b) { return b + a; }

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator-(dd a, double b) { return a + (-b); }
inline dd operator-(double a, dd b) { return dd(a) + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator*(double a, dd b) { return b * a; }

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - q1 * b;
    double q2 = r.hi / b.hi;
    r = r - q2 * b;
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + q3;
}

inline dd operator/(dd a, double b) { return a / dd(b); }
inline dd operator/(double a, dd b) { return dd(a) / b; }

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<(dd a, double b) { return a < dd(b); }
inline bool operator>(dd a, double b) { return dd(b) < a; }

inline dd fabs(dd a) { return a.hi < 0.0 ? -a : a; }

inline dd ldexp(dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

// hi = nearest double, lo = residual (QD library values)
inline constexpr dd dd_ln2{6.931471805599452862e-01, 2.319046813846299558e-17};
inline constexpr dd dd_pi{3.141592653589793116e+00, 1.224646799147353207e-16};

inline dd exp(dd x) {
    // e^x = 2^m * (e^r)^(2^9) with r = (x - m ln2) / 2^9
    if (x.hi > 709.0) return dd(std::numeric_limits<double>::infinity());
    if (x.hi < -745.0) return dd(0.0);
    static const dd inv_fact[] = {
        dd(1.0) / 6.0,    dd(1.0) / 24.0,     dd(1.0) / 120.0,
        dd(1.0) / 720.0,  dd(1.0) / 5040.0,   dd(1.0) / 40320.0,
        dd(1.0) / 362880.0, dd(1.0) / 3628800.0, dd(1.0) / 39916800.0,
    };
    double m = std::round(x.hi / dd_ln2.hi);
    dd r = ldexp(x - dd_ln2 * m, -9);
    // Taylor of e^r - 1
    dd p = r * r * 0.5;
    dd s = r + p;
    dd rpow = r * r;
    for (const dd& invf : inv_fact) {
        rpow = rpow * r;
        p = rpow * invf;
        s = s + p;
        if (std::fabs(p.hi) < 1e-35) break;
    }
    // undo the 2^-9 scaling: (1+s)^2 - 1 = s^2 + 2s, nine times
    for (int i = 0; i < 9; ++i) s = s * s + ldexp(s, 1);
    s = s + 1.0;
    return ldexp(s, static_cast<int>(m));
}

inline dd log(dd x) {
    // one Newton step on e^y = x from the double seed doubles its 53 bits
    double y0 = std::log(x.hi);
    return dd(y0) + x * exp(dd(-y0)) - 1.0;
}

// log Gamma for strictly positive argument, ~1e-30 relative accuracy.
// Stirling series with Bernoulli tail after lifting the argument above 38
// through Gamma(x) = Gamma(x+n) / (x (x+1) ... (x+n-1)).
inline dd lgamma(dd x) {
    // B_{2k} / (2k (2k-1)) as exact integer ratios
    static const dd stirling_coeff[] = {
        dd(1.0) / 12.0,
        dd(-1.0) / 360.0,
        dd(1.0) / 1260.0,
        dd(-1.0) / 1680.0,
        dd(1.0) / 1188.0,
        dd(-691.0) / 360360.0,
        dd(1.0) / 156.0,
        dd(-3617.0) / 122400.0,
        dd(43867.0) / 244188.0,
        dd(-174611.0) / 125400.0,
        dd(77683.0) / 5796.0,
        dd(-236364091.0) / 1506960.0,
        dd(657931.0) / 300.0,
        dd(-3392780147.0) / 93960.0,
    };
    static const dd half_ln_2pi = dd(0.5) * (dd_ln2 + log(dd(dd_pi)));
    dd w = x;
    dd shift_product(1.0);
    bool shifted = false;
    while (w.hi < 38.0) {
        shift_product = shift_product * w;
        w = w + 1.0;
        shifted = true;
    }
    dd winv2 = 1.0 / (w * w);
    dd tail(0.0);
    dd wpow = 1.0 / w; // w^(1-2k), starting at k=1
    for (const dd& c : stirling_coeff) {
        tail = tail + c * wpow;
        wpow = wpow * winv2;
    }
    dd result = (w - 0.5) * log(w) - w + half_ln_2pi + tail;
    if (shifted) result = result - log(shift_product);
    return result;
}

} // namespace fracvisc::detail

#endif
