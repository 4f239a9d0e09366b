#ifndef FRACVISC_DETAIL_ROOT_FINDING_HPP
#define FRACVISC_DETAIL_ROOT_FINDING_HPP

// Bracketing root solver: Brent's method (bisection / secant / inverse
// quadratic) on a sign-changing interval. No derivatives required; the
// callers guarantee monotone functions, so a valid bracket cannot be lost.

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracvisc/errors.hpp"

namespace fracvisc::detail {

template <typename F>
double brent(F&& f, double a, double b, double fa, double fb, double xtol, double ftol,
             int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw domain_error("brent: endpoints do not bracket a root");
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
                      0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || std::fabs(fb) <= ftol) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc;
                double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (fb == 0.0) return b;
    }
    throw convergence_error("brent: iteration budget exhausted");
}

struct bracket {
    double lo, hi, flo, fhi;
};

// Expand [lo, hi] geometrically to the right until f changes sign across it.
// Callers invert monotone functions, so the loop terminates unless the target
// lies outside the function's range.
template <typename F>
bracket expand_bracket_right(F&& f, double lo, double hi, double flo, double growth = 2.0,
                             int max_expansions = 200) {
    double fhi = f(hi);
    for (int i = 0; i < max_expansions; ++i) {
        if ((flo > 0.0) != (fhi > 0.0) || fhi == 0.0) return {lo, hi, flo, fhi};
        lo = hi;
        flo = fhi;
        hi *= growth;
        fhi = f(hi);
    }
    throw convergence_error("expand_bracket_right: no sign change found");
}

} // namespace fracvisc::detail

#endif
