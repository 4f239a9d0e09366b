#ifndef FRACVISC_RELAXATION_HPP
#define FRACVISC_RELAXATION_HPP

// The two relaxation moduli of the constant-strain experiment and their
// verification checks.
//
//   sigma_F(t) = sigma0 E_alpha[-(t/tau0)^alpha]        (fractional model)
//   sigma_R(t) = k0 E_alpha[-((t+c)/tau0)^alpha],       (nonlinear model)
//                with c solving E_alpha[-(c/tau0)^alpha] = sigma0/k0.
//
// The two coincide iff c = 0, i.e. iff sigma0 = k0. For sigma0 < k0 the
// nonlinear solution is pinched between sigma_F and (k0/sigma0) sigma_F for
// all t > 0, with the ratio sigma_R/sigma_F growing monotonically to
// k0/sigma0.
//
// sigma_R is also produced by direct numerical integration of
// sigma' = -sigma / tau(sigma), with tau evaluated through the stress
// inversion at every stage; this route shares nothing with the closed form
// beyond the Mittag-Leffler kernel itself.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fracvisc/constitutive.hpp"
#include "fracvisc/curve.hpp"
#include "fracvisc/detail/ode.hpp"
#include "fracvisc/errors.hpp"
#include "fracvisc/mittag_leffler.hpp"

namespace fracvisc {

enum class CurveKind { fractional, ret_closed, ret_ode, upper_bound };

inline const char* kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::fractional: return "fractional";
        case CurveKind::ret_closed: return "ret_closed";
        case CurveKind::ret_ode: return "ret_ode";
        case CurveKind::upper_bound: return "upper_bound";
    }
    return "?";
}

/// A relaxation modulus sampled on a time grid, in the normalized variables
/// t/tau0 and sigma/k0.
struct RelaxationCurve {
    std::vector<double> t_over_tau0;
    std::vector<double> sigma_over_k0;
    CurveKind kind = CurveKind::fractional;
    double sigma0 = 0.0;
    MaterialParams params;

    SampledCurve as_curve() const {
        SampledCurve c;
        c.x = t_over_tau0;
        c.y = sigma_over_k0;
        c.x_label = "t_over_tau0";
        c.y_label = "sigma_over_k0";
        c.meta = {{"kind", kind_name(kind)},
                  {"alpha", format_full(params.alpha)},
                  {"tau0", format_full(params.tau0)},
                  {"k0", format_full(params.k0)},
                  {"sigma0", format_full(sigma0)}};
        return c;
    }
};

/// Step-error tolerances and start handling for the ODE route.
struct OdeConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_start_offset = 1e-4; ///< fraction of tau0, used only when sigma0 = k0
    long max_steps = 200000;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw domain_error("OdeConfig: tolerances must be positive");
        if (!(t_start_offset > 0.0) || !(t_start_offset <= 1e-3))
            throw domain_error("OdeConfig: t_start_offset must lie in (0, 1e-3]");
        if (max_steps <= 0) throw domain_error("OdeConfig: max_steps must be positive");
    }
};

/// Structured pass/fail result of a verification check.
struct VerificationReport {
    std::string check;
    bool pass = false;
    double worst_violation = 0.0; ///< magnitude of the worst breach (0 if none)
    double worst_location = 0.0;  ///< t or sigma of the worst case
    double tolerance = 0.0;
    std::string note;

    std::string to_text() const {
        std::ostringstream os;
        os << "check: " << check << "\n"
           << "pass: " << (pass ? "yes" : "no") << "\n"
           << "worst_violation: " << format_full(worst_violation) << "\n"
           << "worst_location: " << format_full(worst_location) << "\n"
           << "tolerance: " << format_full(tolerance) << "\n";
        if (!note.empty()) os << "note: " << note << "\n";
        return os.str();
    }

    std::string to_key_value() const {
        std::ostringstream os;
        os << "check=" << check << "\n"
           << "pass=" << (pass ? 1 : 0) << "\n"
           << "worst_violation=" << format_full(worst_violation) << "\n"
           << "worst_location=" << format_full(worst_location) << "\n"
           << "tolerance=" << format_full(tolerance) << "\n"
           << "note=" << note << "\n";
        return os.str();
    }
};

/// Fractional relaxation modulus sigma0 E_alpha[-(t/tau0)^alpha].
inline double sigma_fractional(double t, double sigma0, const MaterialParams& p,
                               const MLConfig& ml = {}) {
    p.validate();
    if (!std::isfinite(t) || t < 0.0)
        throw domain_error("sigma_fractional: time must be finite and >= 0");
    if (!(sigma0 > 0.0)) throw domain_error("sigma_fractional: sigma0 must be positive");
    return sigma0 * ml_relax(p.alpha, t / p.tau0, ml);
}

/// Time offset c >= 0 solving E_alpha[-(c/tau0)^alpha] = sigma0/k0.
/// c = 0 iff sigma0 = k0; no solution exists for sigma0 > k0.
inline double offset_c(double sigma0, const MaterialParams& p, double tol = 1e-12,
                       double sigma_floor = default_sigma_floor, const MLConfig& ml = {}) {
    p.validate();
    if (sigma0 > p.k0 * (1.0 + tol))
        throw domain_error("offset_c: sigma0 exceeds k0; the relaxation kernel never "
                           "exceeds 1, so no offset exists");
    return s_of_sigma(std::min(sigma0, p.k0), p, tol, sigma_floor, ml);
}

/// Nonlinear relaxation modulus in closed form:
/// k0 E_alpha[-((t+c)/tau0)^alpha] with c = offset_c(sigma0).
inline double sigma_ret_closed(double t, double sigma0, const MaterialParams& p,
                               double tol = 1e-12, const MLConfig& ml = {}) {
    if (!std::isfinite(t) || t < 0.0)
        throw domain_error("sigma_ret_closed: time must be finite and >= 0");
    double c = offset_c(sigma0, p, tol, default_sigma_floor, ml);
    return p.k0 * ml_relax(p.alpha, (t + c) / p.tau0, ml);
}

inline RelaxationCurve sample_fractional(const std::vector<double>& t_grid, double sigma0,
                                         const MaterialParams& p, const MLConfig& ml = {}) {
    RelaxationCurve c;
    c.kind = CurveKind::fractional;
    c.sigma0 = sigma0;
    c.params = p;
    c.t_over_tau0.reserve(t_grid.size());
    c.sigma_over_k0.reserve(t_grid.size());
    for (double t : t_grid) {
        c.t_over_tau0.push_back(t / p.tau0);
        c.sigma_over_k0.push_back(sigma_fractional(t, sigma0, p, ml) / p.k0);
    }
    return c;
}

inline RelaxationCurve sample_ret_closed(const std::vector<double>& t_grid, double sigma0,
                                         const MaterialParams& p, double tol = 1e-12,
                                         const MLConfig& ml = {}) {
    p.validate();
    double c = offset_c(sigma0, p, tol, default_sigma_floor, ml);
    RelaxationCurve out;
    out.kind = CurveKind::ret_closed;
    out.sigma0 = sigma0;
    out.params = p;
    out.t_over_tau0.reserve(t_grid.size());
    out.sigma_over_k0.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!std::isfinite(t) || t < 0.0)
            throw domain_error("sample_ret_closed: grid times must be >= 0");
        out.t_over_tau0.push_back(t / p.tau0);
        out.sigma_over_k0.push_back(ml_relax(p.alpha, (t + c) / p.tau0, ml));
    }
    return out;
}

namespace detail {

// Right-hand side -sigma / tau(sigma) with the stress inversion warm-started
// from the previous evaluation; along a relaxation trajectory the scaled
// inversion point x = s/tau0 only drifts, so the bracket stays tight.
class ret_rhs {
  public:
    ret_rhs(const MaterialParams& p, const MLConfig& ml) : p_(p), ml_(ml) {}

    double operator()(double /*t*/, double sigma) const {
        double target = sigma / p_.k0;
        if (target >= 1.0) target = 1.0 - 1e-15;
        if (target < default_sigma_floor) target = default_sigma_floor;
        double x = invert(target);
        last_x_ = x;
        double tau = relaxation_time(x * p_.tau0, p_, ml_);
        return -sigma / tau;
    }

  private:
    double invert(double target) const {
        auto f = [&](double x) { return ml_relax(p_.alpha, x, ml_) - target; };
        double lo = 0.0, flo = 1.0 - target;
        double hi = last_x_ > 0.0 ? last_x_ : 1.0;
        double fhi = f(hi);
        while (fhi > 0.0) { // target below the bracket: extend right
            lo = hi;
            flo = fhi;
            hi = std::max(2.0 * hi, 1.0);
            fhi = f(hi);
        }
        if (lo == 0.0 && last_x_ > 0.0) {
            // try to tighten from the left using the previous point
            double cand = 0.5 * last_x_;
            while (cand > 1e-300) {
                double fc = f(cand);
                if (fc > 0.0) {
                    lo = cand;
                    flo = fc;
                    break;
                }
                hi = cand;
                fhi = fc;
                cand *= 0.5;
            }
        }
        return brent(f, lo, hi, flo, fhi, 1e-15, 1e-13);
    }

    const MaterialParams& p_;
    const MLConfig& ml_;
    mutable double last_x_ = -1.0;
};

} // namespace detail

/// Nonlinear relaxation modulus by direct numerical integration of
/// sigma' = -sigma/tau(sigma). For sigma0 = k0 the slope at t = 0 is
/// infinite (proportional to t^(alpha-1)); the stepper then starts at
/// t_start_offset * tau0 from the closed-form value, and grid points before
/// that anchor are filled from the closed form.
inline RelaxationCurve sigma_ret_ode(const std::vector<double>& t_grid, double sigma0,
                                     const MaterialParams& p, const OdeConfig& ode = {},
                                     const MLConfig& ml = {}) {
    p.validate();
    ode.validate();
    if (t_grid.empty()) throw domain_error("sigma_ret_ode: empty time grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0)
            throw domain_error("sigma_ret_ode: grid times must be >= 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw domain_error("sigma_ret_ode: grid must increase");
    }
    if (!(sigma0 > default_sigma_floor * p.k0) || sigma0 > p.k0 * (1.0 + 1e-12))
        throw domain_error("sigma_ret_ode: sigma0 must lie in (sigma_floor*k0, k0]");

    const bool singular_start = sigma0 >= p.k0 * (1.0 - 1e-12);
    double t0 = 0.0;
    double y0 = sigma0;
    if (singular_start) {
        t0 = ode.t_start_offset * p.tau0;
        y0 = p.k0 * ml_relax(p.alpha, ode.t_start_offset, ml);
    }

    detail::ode_controls ctl{ode.rel_tol, ode.abs_tol, ode.max_steps};
    std::vector<double> y;
    double guard = ode.abs_tol * std::max(p.k0, 1.0);
    auto monitor = [&](double t, double yv) {
        if (yv < -guard || yv > p.k0 * (1.0 + 1e-12) + guard)
            throw convergence_error("sigma_ret_ode: state left (0, k0] at t = " +
                                    std::to_string(t));
    };
    if (p.alpha == 1.0) {
        // tau is identically tau0: no inversion needed
        auto rhs = [&](double, double s) { return -s / p.tau0; };
        detail::dopri5_to_grid(rhs, t0, y0, t_grid, ctl, y, monitor);
    } else {
        detail::ret_rhs rhs(p, ml);
        detail::dopri5_to_grid(rhs, t0, y0, t_grid, ctl, y, monitor);
    }

    RelaxationCurve out;
    out.kind = CurveKind::ret_ode;
    out.sigma0 = sigma0;
    out.params = p;
    out.t_over_tau0.reserve(t_grid.size());
    out.sigma_over_k0.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double value;
        if (t_grid[i] < t0) {
            // before the anchor the closed form covers the singular layer
            value = p.k0 * ml_relax(p.alpha, t_grid[i] / p.tau0, ml);
        } else {
            value = y[i];
        }
        out.t_over_tau0.push_back(t_grid[i] / p.tau0);
        out.sigma_over_k0.push_back(value / p.k0);
    }
    return out;
}

/// Pointwise check of the strict envelope
///   sigma_F(t) < sigma_R(t) < (k0/sigma0) sigma_F(t),  t > 0,
/// plus monotone growth of the ratio sigma_R/sigma_F toward k0/sigma0.
/// Two degenerate boundaries are checked as (near-)equalities instead of
/// strict orderings: alpha = 1, where sigma_R = sigma_F exactly, and
/// sigma0 -> k0, where the whole envelope collapses onto one curve.
inline VerificationReport verify_envelope_bounds(double sigma0, const MaterialParams& p,
                                                 const std::vector<double>& t_grid,
                                                 double tol = 1e-12,
                                                 const MLConfig& ml = {}) {
    p.validate();
    if (!(sigma0 > 0.0) || !(sigma0 < p.k0))
        throw domain_error("verify_envelope_bounds: requires 0 < sigma0 < k0");
    VerificationReport rep;
    rep.check = "envelope_bounds";
    rep.tolerance = tol;
    const double c = offset_c(sigma0, p, std::min(tol, 1e-12), default_sigma_floor, ml);
    const double limit_ratio = p.k0 / sigma0;
    double worst = 0.0, worst_t = 0.0;
    double prev_ratio = 1.0; // ratio at t = 0+
    bool ratio_monotone = true;
    const double margin = 1e-12 * p.k0;
    if (p.k0 - sigma0 <= 1e-6 * p.k0) {
        // collapsed envelope: upper and lower bounds pinch sigma_R between
        // curves that differ by the factor k0/sigma0 ~ 1
        for (double t : t_grid) {
            double sF = sigma_fractional(t, sigma0, p, ml);
            double sR = p.k0 * ml_relax(p.alpha, (t + c) / p.tau0, ml);
            double width = limit_ratio * sF - sF;
            double outside = std::max(sF - sR, sR - limit_ratio * sF);
            double dev = std::max(width, outside);
            if (dev > worst) {
                worst = dev;
                worst_t = t;
            }
        }
        rep.pass = worst <= std::max(tol * p.k0, 2.0 * (p.k0 - sigma0));
        rep.worst_violation = worst;
        rep.worst_location = worst_t;
        rep.note = "sigma0 -> k0 boundary case: bounds collapse onto the coincident "
                   "solution; checked as near-equality";
        return rep;
    }
    if (p.alpha == 1.0) {
        for (double t : t_grid) {
            double sF = sigma_fractional(t, sigma0, p, ml);
            double sR = p.k0 * ml_relax(1.0, (t + c) / p.tau0, ml);
            double dev = std::fabs(sR - sF);
            if (dev > worst) {
                worst = dev;
                worst_t = t;
            }
        }
        rep.pass = worst <= tol * p.k0;
        rep.worst_violation = worst;
        rep.worst_location = worst_t;
        rep.note = "alpha = 1 boundary case: strict lower bound degenerates to "
                   "equality (sigma_R = sigma_F); checked as equality";
        return rep;
    }
    for (double t : t_grid) {
        if (!(t > 0.0))
            throw domain_error("verify_envelope_bounds: grid times must be > 0");
        double sF = sigma_fractional(t, sigma0, p, ml);
        double sR = p.k0 * ml_relax(p.alpha, (t + c) / p.tau0, ml);
        double lower_margin = sR - sF;
        double upper_margin = limit_ratio * sF - sR;
        double breach = std::max(margin - lower_margin, margin - upper_margin);
        if (breach > worst) {
            worst = breach;
            worst_t = t;
        }
        double ratio = sR / sF;
        if (ratio < prev_ratio - 1e-12 || ratio > limit_ratio * (1.0 + 1e-12))
            ratio_monotone = false;
        prev_ratio = ratio;
    }
    rep.pass = worst <= 0.0 && ratio_monotone;
    rep.worst_violation = std::max(worst, 0.0);
    rep.worst_location = worst_t;
    std::ostringstream note;
    note << "strictness margin " << format_full(margin) << "; ratio monotone "
         << (ratio_monotone ? "yes" : "no") << "; final ratio "
         << format_full(prev_ratio) << " of limit " << format_full(limit_ratio);
    rep.note = note.str();
    return rep;
}

/// Energy-balance check along a relaxation trajectory: the finite-difference
/// time derivative of the viscous energy must match -sigma^2/(rho* mu0)
/// within fd_tol on interior nodes and be nonpositive everywhere.
inline VerificationReport dissipation_check(const RelaxationCurve& curve,
                                            const MaterialParams& p,
                                            const QuadratureConfig& q = {},
                                            double fd_tol = 1e-4,
                                            const MLConfig& ml = {}) {
    p.require_energy_domain();
    q.validate();
    if (curve.kind != CurveKind::ret_closed && curve.kind != CurveKind::ret_ode)
        throw domain_error("dissipation_check: curve must be a nonlinear-model "
                           "relaxation trajectory");
    const std::size_t n = curve.t_over_tau0.size();
    if (n < 3) throw domain_error("dissipation_check: need at least 3 nodes");
    // stress inversion once per node; s increases along the trajectory
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sigma = curve.sigma_over_k0[i] * p.k0;
        x[i] = s_of_sigma(sigma, p, 1e-13, default_sigma_floor, ml) / p.tau0;
    }
    // cumulative complementary integral from the far end backwards
    std::vector<double> ebar(n);
    ebar[n - 1] = detail::ebar_from(p.alpha, x[n - 1], q, ml);
    for (std::size_t i = n - 1; i-- > 0;)
        ebar[i] = ebar[i + 1] + detail::ebar_segment(p.alpha, x[i], x[i + 1], q, ml);
    const double scale = p.k0 * p.k0 * p.tau0 / p.rho_mu();

    VerificationReport rep;
    rep.check = "dissipation_identity";
    rep.tolerance = fd_tol;
    double worst = 0.0, worst_t = 0.0;
    bool sign_ok = true;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = (curve.t_over_tau0[i] - curve.t_over_tau0[i - 1]) * p.tau0;
        double hr = (curve.t_over_tau0[i + 1] - curve.t_over_tau0[i]) * p.tau0;
        double el = ebar[i - 1] * scale, e0 = ebar[i] * scale, er = ebar[i + 1] * scale;
        double deriv = (er * hl * hl - el * hr * hr + e0 * (hr * hr - hl * hl)) /
                       (hl * hr * (hl + hr));
        double sigma = curve.sigma_over_k0[i] * p.k0;
        double expected = -sigma * sigma / p.rho_mu();
        double rel = std::fabs(deriv - expected) / std::fabs(expected);
        if (rel > worst) {
            worst = rel;
            worst_t = curve.t_over_tau0[i];
        }
        if (deriv > 0.0) sign_ok = false;
    }
    rep.pass = worst <= fd_tol && sign_ok;
    rep.worst_violation = worst;
    rep.worst_location = worst_t;
    rep.note = sign_ok ? "energy production nonpositive at every interior node"
                       : "positive energy production detected";
    return rep;
}

} // namespace fracvisc

#endif
