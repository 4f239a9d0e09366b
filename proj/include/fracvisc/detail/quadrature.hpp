#ifndef FRACVISC_DETAIL_QUADRATURE_HPP
#define FRACVISC_DETAIL_QUADRATURE_HPP

// Adaptive Gauss-Kronrod 7-15 quadrature on finite intervals with
// worst-interval-first refinement, plus a non-adaptive single-panel rule
// used by the cumulative curve samplers.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracvisc/errors.hpp"

namespace fracvisc::detail {

// QUADPACK dqk15 nodes and weights on [-1, 1]
inline constexpr double gk15_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double gk15_kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double gk15_gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct panel_result {
    double value = 0.0;
    double error = 0.0;
};

template <typename F>
panel_result gk15_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fc = f(center);
    double kronrod = gk15_kronrod_w[7] * fc;
    double gauss = gk15_gauss_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double dx = half * gk15_nodes[i];
        double fsum = f(center - dx) + f(center + dx);
        kronrod += gk15_kronrod_w[i] * fsum;
        if (i % 2 == 1) gauss += gk15_gauss_w[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::fabs(kronrod - gauss)};
}

struct quad_result {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

// Integrate f over the union of [breaks[i], breaks[i+1]] segments,
// bisecting the interval with the largest error estimate until the summed
// estimate meets max(abs_tol, rel_tol * |value|).
template <typename F>
quad_result integrate_adaptive(F&& f, const std::vector<double>& breaks, double rel_tol,
                               double abs_tol, int max_subdivisions) {
    struct interval {
        double a, b, value, error;
    };
    std::vector<interval> work;
    work.reserve(64);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i] < breaks[i + 1]))
            throw domain_error("integrate_adaptive: breakpoints must increase");
        panel_result p = gk15_panel(f, breaks[i], breaks[i + 1]);
        work.push_back({breaks[i], breaks[i + 1], p.value, p.error});
    }
    auto total = [&work] {
        double v = 0.0, e = 0.0;
        for (const interval& w : work) {
            v += w.value;
            e += w.error;
        }
        return std::pair{v, e};
    };
    auto [value, error] = total();
    int splits = 0;
    while (error > std::max(abs_tol, rel_tol * std::fabs(value))) {
        if (splits >= max_subdivisions)
            throw convergence_error("integrate_adaptive: subdivision budget exhausted");
        auto worst = std::max_element(
            work.begin(), work.end(),
            [](const interval& x, const interval& y) { return x.error < y.error; });
        interval w = *worst;
        double mid = 0.5 * (w.a + w.b);
        if (!(w.a < mid && mid < w.b))
            throw convergence_error("integrate_adaptive: interval underflow");
        panel_result left = gk15_panel(f, w.a, mid);
        panel_result right = gk15_panel(f, mid, w.b);
        *worst = {w.a, mid, left.value, left.error};
        work.push_back({mid, w.b, right.value, right.error});
        ++splits;
        std::tie(value, error) = total();
    }
    return {value, error, splits};
}

template <typename F>
quad_result integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol,
                               int max_subdivisions) {
    return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, rel_tol,
                              abs_tol, max_subdivisions);
}

} // namespace fracvisc::detail

#endif
