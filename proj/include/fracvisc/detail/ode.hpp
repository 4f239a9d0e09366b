#ifndef FRACVISC_DETAIL_ODE_HPP
#define FRACVISC_DETAIL_ODE_HPP

// Adaptive embedded Runge-Kutta for a scalar autonomous-in-practice IVP:
// the Dormand-Prince 5(4) pair with FSAL, per-step error control
// err <= abs_tol + rel_tol * |y|, and output clamped to land exactly on the
// requested grid times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fracvisc/errors.hpp"

namespace fracvisc::detail {

struct ode_controls {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    long max_steps = 200000;
};

// y' = f(t, y); fills y_out[i] = y(t_grid[i]); t_grid increasing, first entry
// equals t0 (y0 is copied there). on_accept(t, y) runs after every accepted
// step so callers can police state-domain excursions.
template <typename F, typename Monitor>
void dopri5_to_grid(F&& f, double t0, double y0, const std::vector<double>& t_grid,
                    const ode_controls& c, std::vector<double>& y_out,
                    Monitor&& on_accept) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0,
                            e4 = b4 - 393.0 / 640.0, e5 = b5 + 92097.0 / 339200.0,
                            e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;

    if (t_grid.empty()) return;
    y_out.assign(t_grid.size(), 0.0);
    double t = t0;
    double y = y0;
    std::size_t next = 0;
    while (next < t_grid.size() && t_grid[next] <= t0) {
        y_out[next++] = y0;
    }
    if (next >= t_grid.size()) return;

    double k1 = f(t, y);
    double h = (t_grid.back() - t0) * 1e-4;
    long steps = 0;
    while (next < t_grid.size()) {
        bool clipped = false;
        if (t + h >= t_grid[next]) {
            h = t_grid[next] - t;
            clipped = true;
        }
        double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                      std::max(std::fabs(t), 1.0);
        if (h < hmin && !clipped)
            throw convergence_error("dopri5: step size underflow at t = " +
                                    std::to_string(t));
        if (++steps > c.max_steps)
            throw convergence_error("dopri5: step budget exhausted at t = " +
                                    std::to_string(t));
        double k2 = f(t + c2 * h, y + h * (a21 * k1));
        double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        double k6 =
            f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        double k7 = f(t + h, ynew); // FSAL
        double err = std::fabs(
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        double scale = c.abs_tol + c.rel_tol * std::max(std::fabs(y), std::fabs(ynew));
        if (err <= scale) {
            t += h;
            y = ynew;
            k1 = k7;
            on_accept(t, y);
            // grid landings are exact up to the final rounding of t + h
            double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::fabs(t), 1.0);
            while (next < t_grid.size() && t >= t_grid[next] - slack) y_out[next++] = y;
        }
        double factor = (err > 0.0) ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
}

} // namespace fracvisc::detail

#endif
