#ifndef FRACVISC_CONSTITUTIVE_HPP
#define FRACVISC_CONSTITUTIVE_HPP

// The stress/energy constitutive family behind the nonlinear relaxation
// experiment, in parametric form over the parameter time s >= 0:
//
//   sigma(s) = k0 E_alpha[-(s/tau0)^alpha]
//   e(s)     = e0 - k0^2/(rho* mu0) * integral_0^s E_alpha[-(sbar/tau0)^alpha]^2 dsbar
//
// with e0 fixed so that the energy vanishes as sigma -> 0. The energy is
// finite on [0, k0] iff alpha > 1/2 (the squared kernel decays like
// s^(-2 alpha)). The nonlinear relaxation time is
//
//   tau(sigma(s)) = rho* mu0 e'(sigma)/sigma
//                 = -tau0 E_alpha(-x^alpha) / (d/dx E_alpha(-x^alpha)),  x = s/tau0,
//
// which vanishes at sigma = k0, diverges as sigma -> 0, and equals tau0
// identically when alpha = 1.
//
// All energies are computed internally in the dimensionless normalization
// ebar = [rho* mu0 / (tau0 k0^2)] e, i.e. ebar(x) = integral_x^inf E^2 du.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracvisc/curve.hpp"
#include "fracvisc/detail/quadrature.hpp"
#include "fracvisc/detail/root_finding.hpp"
#include "fracvisc/errors.hpp"
#include "fracvisc/mittag_leffler.hpp"

namespace fracvisc {

inline constexpr double default_sigma_floor = 1e-6;

/// Physical and model constants of the relaxation experiment.
struct MaterialParams {
    double alpha = 0.6;    ///< fractional order, (0, 1]
    double tau0 = 1.0;     ///< relaxation time constant
    double k0 = 1.0;       ///< structural stress constant
    double rho_star = 1.0; ///< reference mass density
    double mu0 = 1.0;      ///< viscous coefficient at the experiment's strain
    double eps0 = 0.0;     ///< constant strain, retained for labeling only

    double rho_mu() const { return rho_star * mu0; }

    void validate() const {
        if (!(tau0 > 0.0)) throw domain_error("MaterialParams: tau0 must be > 0");
        if (!(k0 > 0.0)) throw domain_error("MaterialParams: k0 must be > 0");
        if (!(rho_star > 0.0)) throw domain_error("MaterialParams: rho_star must be > 0");
        if (!(mu0 > 0.0)) throw domain_error("MaterialParams: mu0 must be > 0");
        if (!(alpha > 0.0) || !(alpha <= 1.0))
            throw domain_error("MaterialParams: alpha must lie in (0, 1]");
    }

    void require_energy_domain() const {
        validate();
        if (!(alpha > 0.5))
            throw non_integrable_error(
                "viscous energy is unbounded: the squared relaxation kernel decays "
                "like s^(-2 alpha), integrable only for alpha > 1/2");
    }
};

/// Tolerances and mesh controls for the energy integrals.
struct QuadratureConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;   ///< in normalized energy units
    double tail_start = 40.0; ///< multiple of tau0 where the analytic tail takes over
    int max_subdivisions = 2000;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw domain_error("QuadratureConfig: tolerances must be positive");
        if (!(tail_start >= 10.0))
            throw domain_error("QuadratureConfig: tail_start must be >= 10");
        if (max_subdivisions < 100)
            throw domain_error("QuadratureConfig: max_subdivisions must be >= 100");
    }
};

/// Normalized viscous energy sampled on a stress grid.
struct EnergyCurve {
    std::vector<double> sigma_over_k0;
    std::vector<double> ebar; ///< [rho* mu0/(tau0 k0^2)] e
    MaterialParams params;

    SampledCurve as_curve() const {
        SampledCurve c;
        c.x = sigma_over_k0;
        c.y = ebar;
        c.x_label = "sigma_over_k0";
        c.y_label = "value";
        c.meta = {{"quantity", "viscous_energy"},
                  {"alpha", format_full(params.alpha)},
                  {"tau0", format_full(params.tau0)},
                  {"k0", format_full(params.k0)},
                  {"normalization", "rho_star*mu0/(tau0*k0^2)"}};
        return c;
    }
};

namespace detail {

// integral_x^inf E_alpha(-u^alpha)^2 du for x at or beyond the tail split.
// The kernel is replaced by its optimally truncated algebraic expansion
// E ~ sum_k a_k u^(-alpha k); the square integrates term by term. Working
// with the scaled terms t_k = a_k x^(-alpha k) keeps every intermediate
// quantity bounded by |t_1| < 1.
inline double ebar_tail(double alpha, double x) {
    std::vector<double> t = ml_asym_terms(alpha, 1.0, alpha * std::log(x), 180);
    double sum = 0.0;
    const int n = static_cast<int>(t.size());
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            sum += t[i - 1] * t[j - 1] / (alpha * (i + j) - 1.0);
    return x * sum;
}

// integral_a^b E_alpha(-u^alpha)^2 du on a finite interval. The integrand is
// positive, so the panel error is controlled purely relatively: an absolute
// floor would let short far-tail segments (tiny values) absorb noise that
// the dissipation check would then see amplified.
inline double ebar_segment(double alpha, double a, double b, const QuadratureConfig& q,
                           const MLConfig& ml) {
    if (!(a < b)) return 0.0;
    auto f = [&](double u) {
        double e = ml_relax(alpha, u, ml);
        return e * e;
    };
    std::vector<double> breaks{a};
    if (a < 1.0 && 1.0 < b) breaks.push_back(1.0); // kernel knee near u ~ 1
    breaks.push_back(b);
    return integrate_adaptive(f, breaks, q.rel_tol, 1e-300, q.max_subdivisions).value;
}

// integral_x^inf E^2 du for any x >= 0
inline double ebar_from(double alpha, double x, const QuadratureConfig& q,
                        const MLConfig& ml) {
    if (x >= q.tail_start) return ebar_tail(alpha, x);
    return ebar_segment(alpha, x, q.tail_start, q, ml) + ebar_tail(alpha, q.tail_start);
}

} // namespace detail

/// Stress of the parametric family: k0 E_alpha[-(s/tau0)^alpha], s >= 0.
inline double sigma_of_s(double s, const MaterialParams& p, const MLConfig& ml = {}) {
    p.validate();
    if (!std::isfinite(s) || s < 0.0)
        throw domain_error("sigma_of_s: parameter time must be finite and >= 0");
    return p.k0 * ml_relax(p.alpha, s / p.tau0, ml);
}

/// Inverse of sigma_of_s on (sigma_floor k0, k0]. Monotone bracketing:
/// geometric expansion from s = tau0, then Brent.
inline double s_of_sigma(double sigma, const MaterialParams& p, double tol = 1e-12,
                         double sigma_floor = default_sigma_floor,
                         const MLConfig& ml = {}) {
    p.validate();
    if (!(tol > 0.0)) throw domain_error("s_of_sigma: tolerance must be positive");
    if (!std::isfinite(sigma)) throw domain_error("s_of_sigma: sigma must be finite");
    if (sigma > p.k0 * (1.0 + tol))
        throw domain_error("s_of_sigma: sigma exceeds k0, outside the constitutive range");
    if (sigma >= p.k0) return 0.0;
    if (sigma <= sigma_floor * p.k0)
        throw domain_error(
            "s_of_sigma: sigma at or below the configured floor (s diverges as "
            "sigma -> 0)");
    const double target = sigma / p.k0;
    auto f = [&](double x) { return ml_relax(p.alpha, x, ml) - target; };
    double f0 = 1.0 - target;
    detail::bracket br = detail::expand_bracket_right(f, 0.0, 1.0, f0);
    double x = detail::brent(f, br.lo, br.hi, br.flo, br.fhi, 1e-15, tol);
    return x * p.tau0;
}

/// Normalization constant e0 = [k0^2/(rho* mu0)] integral_0^inf E^2 dsbar,
/// finite iff alpha > 1/2. Computed at tail_start and 2*tail_start; the two
/// values must agree, otherwise the tail model is flagged unstable.
inline double e0_constant(const MaterialParams& p, const QuadratureConfig& q = {},
                          const MLConfig& ml = {}) {
    p.require_energy_domain();
    q.validate();
    const double head = detail::ebar_segment(p.alpha, 0.0, q.tail_start, q, ml);
    const double ext = detail::ebar_segment(p.alpha, q.tail_start, 2.0 * q.tail_start, q, ml);
    const double v1 = head + detail::ebar_tail(p.alpha, q.tail_start);
    const double v2 = head + ext + detail::ebar_tail(p.alpha, 2.0 * q.tail_start);
    if (std::fabs(v1 - v2) > 100.0 * q.rel_tol * std::fabs(v2) + q.abs_tol)
        throw convergence_error("e0_constant: analytic tail unstable under tail_start "
                                "doubling; increase tail_start");
    return v2 * p.k0 * p.k0 * p.tau0 / p.rho_mu();
}

/// Viscous energy along the parameter: e(s) = e0 - [k0^2/(rho* mu0)]
/// integral_0^s E^2. Evaluated as the complementary integral from s to
/// infinity, which avoids cancellation for large s.
inline double viscous_energy_param(double s, const MaterialParams& p,
                                   const QuadratureConfig& q = {},
                                   const MLConfig& ml = {}) {
    p.require_energy_domain();
    q.validate();
    if (!std::isfinite(s) || s < 0.0)
        throw domain_error("viscous_energy_param: parameter time must be >= 0");
    return detail::ebar_from(p.alpha, s / p.tau0, q, ml) * p.k0 * p.k0 * p.tau0 /
           p.rho_mu();
}

/// Viscous energy as a function of stress on [0, k0]; 0 at sigma = 0 by the
/// tail-limit convention, e0 at sigma = k0.
inline double viscous_energy(double sigma, const MaterialParams& p,
                             const QuadratureConfig& q = {}, double tol = 1e-12,
                             double sigma_floor = default_sigma_floor,
                             const MLConfig& ml = {}) {
    p.require_energy_domain();
    if (!std::isfinite(sigma) || sigma < 0.0 || sigma > p.k0 * (1.0 + tol))
        throw domain_error("viscous_energy: sigma must lie in [0, k0]");
    if (sigma == 0.0) return 0.0;
    return viscous_energy_param(s_of_sigma(sigma, p, tol, sigma_floor, ml), p, q, ml);
}

/// Nonlinear relaxation time along the parameter:
/// tau(s) = -tau0 E_alpha(-x^alpha) / (d/dx E_alpha(-x^alpha)), x = s/tau0.
/// Vanishes at s = 0 for alpha < 1 (the raw expression is 0*inf there);
/// equals tau0 for all s when alpha = 1; grows like s/alpha as s -> inf.
inline double relaxation_time(double s, const MaterialParams& p, const MLConfig& ml = {}) {
    p.validate();
    if (!std::isfinite(s) || s < 0.0)
        throw domain_error("relaxation_time: parameter time must be >= 0");
    if (p.alpha == 1.0) return p.tau0;
    if (s == 0.0) return 0.0;
    const double x = s / p.tau0;
    return -p.tau0 * ml_relax(p.alpha, x, ml) / ml_relax_deriv(p.alpha, x, ml);
}

/// relaxation_time composed with the stress inversion. The divergence as
/// sigma -> 0 is reported through near_floor, never silently truncated.
struct TauOfSigma {
    double tau = 0.0;
    bool near_floor = false;
};

inline TauOfSigma relaxation_time_of_sigma(double sigma, const MaterialParams& p,
                                           double tol = 1e-12,
                                           double sigma_floor = default_sigma_floor,
                                           const MLConfig& ml = {}) {
    double s = s_of_sigma(sigma, p, tol, sigma_floor, ml);
    return {relaxation_time(s, p, ml), sigma <= 10.0 * sigma_floor * p.k0};
}

/// Normalized relaxation-time and viscous-energy curves over a stress grid
/// (sigma/k0 values, increasing, in (0, 1]). The energy integral is
/// accumulated once across the grid instead of being recomputed from scratch
/// at every point.
struct EnergyTauCurves {
    EnergyCurve energy;
    SampledCurve tau;
};

inline EnergyTauCurves sample_energy_and_tau(const MaterialParams& p,
                                             const std::vector<double>& sigma_over_k0,
                                             const QuadratureConfig& q = {},
                                             const MLConfig& ml = {}) {
    p.require_energy_domain();
    q.validate();
    if (sigma_over_k0.empty())
        throw domain_error("sample_energy_and_tau: empty stress grid");
    for (std::size_t i = 0; i < sigma_over_k0.size(); ++i) {
        if (!(sigma_over_k0[i] > 0.0) || !(sigma_over_k0[i] <= 1.0))
            throw domain_error("sample_energy_and_tau: grid values must lie in (0, 1]");
        if (i > 0 && !(sigma_over_k0[i] > sigma_over_k0[i - 1]))
            throw domain_error("sample_energy_and_tau: grid must increase");
    }
    const std::size_t n = sigma_over_k0.size();
    std::vector<double> x(n); // s/tau0, decreasing across the grid
    for (std::size_t i = 0; i < n; ++i)
        x[i] = s_of_sigma(sigma_over_k0[i] * p.k0, p, 1e-13, default_sigma_floor, ml) /
               p.tau0;
    std::vector<double> ebar(n);
    std::vector<double> tau(n);
    // accumulate from the largest s (smallest sigma) upward
    double acc = detail::ebar_from(p.alpha, x[0], q, ml);
    ebar[0] = acc;
    for (std::size_t i = 1; i < n; ++i) {
        acc += detail::ebar_segment(p.alpha, x[i], x[i - 1], q, ml);
        ebar[i] = acc;
    }
    for (std::size_t i = 0; i < n; ++i)
        tau[i] = relaxation_time(x[i] * p.tau0, p, ml) / p.tau0;
    EnergyTauCurves out;
    out.energy.sigma_over_k0 = sigma_over_k0;
    out.energy.ebar = std::move(ebar);
    out.energy.params = p;
    out.tau.x = sigma_over_k0;
    out.tau.y = std::move(tau);
    out.tau.x_label = "sigma_over_k0";
    out.tau.y_label = "value";
    out.tau.meta = {{"quantity", "relaxation_time"},
                    {"alpha", format_full(p.alpha)},
                    {"tau0", format_full(p.tau0)},
                    {"k0", format_full(p.k0)},
                    {"normalization", "tau/tau0"}};
    return out;
}

} // namespace fracvisc

#endif
