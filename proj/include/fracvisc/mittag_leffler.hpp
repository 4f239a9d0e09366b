#ifndef FRACVISC_MITTAG_LEFFLER_HPP
#define FRACVISC_MITTAG_LEFFLER_HPP

// Evaluation of the one- and two-parameter Mittag-Leffler functions
//
//   E_{a}(z)    = sum_k z^k / Gamma(a k + 1)
//   E_{a,b}(z)  = sum_k z^k / Gamma(a k + b)
//
// restricted to the domain this library needs: 0 < alpha <= 1, beta > 0,
// real z <= 0. Three regimes:
//
//   * |z| small: the defining power series, accumulated in double-double
//     arithmetic. The alternating terms can exceed the sum by a factor
//     ~exp(|z|^(1/alpha)), so the series is only used while that factor
//     leaves enough of the extended-precision budget.
//   * |z| large, alpha < 1: the spectral integral representation with a
//     positive (for beta in {1, alpha}) smooth integrand, evaluated by
//     adaptive Gauss-Kronrod quadrature.
//   * |z| large, alpha ~ 1: the algebraic large-argument expansion with
//     optimal truncation (the spectral kernel degenerates to a point mass
//     as alpha -> 1).

#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "fracvisc/detail/double_double.hpp"
#include "fracvisc/detail/gamma.hpp"
#include "fracvisc/detail/quadrature.hpp"
#include "fracvisc/errors.hpp"

namespace fracvisc {

/// Controls for Mittag-Leffler evaluation accuracy and regime switching.
struct MLConfig {
    double series_tol = 1e-13; ///< relative truncation target for the power series
    double crossover = 5.0;    ///< |z| boundary between series and large-|z| methods
    int max_terms = 600;       ///< hard cap on series terms

    void validate() const {
        if (!(series_tol > 0.0) || !(series_tol < 1e-6))
            throw domain_error("MLConfig: series_tol must lie in (0, 1e-6)");
        if (!(crossover > 0.0)) throw domain_error("MLConfig: crossover must be positive");
        if (max_terms < 50) throw domain_error("MLConfig: max_terms must be >= 50");
    }
};

/// A point of the admissible evaluation domain.
struct MLPoint {
    double alpha = 1.0;
    double beta = 1.0;
    double z = 0.0;

    void validate() const {
        if (!(alpha > 0.0) || !(alpha <= 1.0))
            throw domain_error("MLPoint: alpha must lie in (0, 1]");
        if (!(beta > 0.0)) throw domain_error("MLPoint: beta must be positive");
        if (!std::isfinite(z) || z > 0.0)
            throw domain_error("MLPoint: z must be finite and <= 0");
    }
};

namespace detail {

inline double cos_pi(double x) { return sin_pi(0.5 - x); }

// Cached Gamma-ratio tables for the power series: for fixed (alpha, beta),
// ratio[k] = Gamma(alpha k + beta) / Gamma(alpha (k+1) + beta), so that
// t_{k+1} = t_k * z * ratio[k]. Thread-local, grown on demand; keeps the
// series at a couple of dd multiplications per term.
struct ml_series_table {
    double alpha = 0.0;
    double beta = 0.0;
    dd recip_gamma_beta;
    dd last_lgamma; // lgamma(alpha * ratio.size() + beta)
    std::vector<dd> ratio;
};

inline ml_series_table& ml_table_for(double alpha, double beta) {
    // deque: growth must not invalidate references handed to callers
    thread_local std::deque<ml_series_table> tables;
    for (ml_series_table& t : tables)
        if (t.alpha == alpha && t.beta == beta) return t;
    ml_series_table t;
    t.alpha = alpha;
    t.beta = beta;
    dd lg = lgamma(dd(beta));
    t.recip_gamma_beta = exp(-lg);
    t.last_lgamma = lg;
    tables.push_back(std::move(t));
    return tables.back();
}

inline void ml_table_extend(ml_series_table& t, std::size_t upto) {
    while (t.ratio.size() < upto) {
        std::size_t k1 = t.ratio.size() + 1;
        dd arg = dd(t.alpha) * static_cast<double>(k1) + t.beta;
        dd lg_next = lgamma(arg);
        t.ratio.push_back(exp(t.last_lgamma - lg_next));
        t.last_lgamma = lg_next;
    }
}

// Power series in double-double arithmetic. Requires z <= 0.
inline double ml_series(double alpha, double beta, double z, const MLConfig& cfg) {
    ml_series_table& table = ml_table_for(alpha, beta);
    dd sum = table.recip_gamma_beta;
    dd term = table.recip_gamma_beta;
    const double floor_scale = std::fabs(table.recip_gamma_beta.hi);
    int small_streak = 0;
    for (int k = 0; k < cfg.max_terms; ++k) {
        if (table.ratio.size() <= static_cast<std::size_t>(k))
            ml_table_extend(table, static_cast<std::size_t>(k) + 64);
        term = term * table.ratio[static_cast<std::size_t>(k)] * z;
        sum = sum + term;
        double scale = std::fabs(sum.hi) + floor_scale;
        if (std::fabs(term.hi) < 2e-31 * scale) {
            if (++small_streak >= 2) return static_cast<double>(sum);
        } else {
            small_streak = 0;
        }
    }
    throw convergence_error(
        "mittag_leffler: power series did not converge within max_terms "
        "(crossover is likely set too high for this alpha)");
}

// Signed magnitudes of the large-argument expansion terms
//   E_{a,b}(z) ~ -sum_{k>=1} term_k,  term_k = z^{-k} / Gamma(b - a k),
// evaluated in log space up to (and including) the globally smallest term.
// Near-pole indices produce locally tiny terms (the reciprocal Gamma dips
// without vanishing), so the divergence onset cannot be detected from a
// single increase; the whole magnitude profile is scanned instead and the
// sum truncated at its global minimum.
inline std::vector<double> ml_asym_terms(double alpha, double beta, double lx,
                                         int kmax) {
    std::vector<double> terms;
    terms.reserve(32);
    double min_mag = std::numeric_limits<double>::infinity();
    std::size_t min_index = 0;
    double first_mag = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        double w = beta - alpha * k;
        double log_mag;
        double sign = (k % 2 == 0) ? -1.0 : 1.0; // (-1)^(k+1)
        if (w >= 0.5) {
            log_mag = -k * lx - lgamma_pos(w);
        } else {
            double s = sin_pi(w);
            if (std::fabs(s) < 1e-10) { // exact Gamma pole: coefficient is 0
                terms.push_back(0.0);
                continue;
            }
            log_mag = -k * lx + lgamma_pos(1.0 - w) +
                      std::log(std::fabs(s) / std::numbers::pi);
            if (s < 0.0) sign = -sign;
        }
        double mag = std::exp(log_mag);
        terms.push_back(sign * mag);
        if (first_mag == 0.0) first_mag = mag;
        if (mag < min_mag) {
            min_mag = mag;
            min_index = terms.size();
        }
        // far past the optimal index the terms only grow; 1e6 of headroom
        // rides out any near-pole dip pattern
        if (mag > 1e6 * min_mag || mag < 1e-25 * first_mag) break;
    }
    terms.resize(min_index);
    return terms;
}

// Optimally truncated large-argument value of E_{a,b}(z), z -> -inf.
// The sign bookkeeping in ml_asym_terms already folds the leading minus and
// the alternating z^{-k} into each term, so the value is the plain sum.
// err_estimate (optional) receives the magnitude of the smallest kept term.
inline double ml_asymptotic(double alpha, double beta, double z, int kmax = 220,
                            double* err_estimate = nullptr) {
    std::vector<double> terms = ml_asym_terms(alpha, beta, std::log(-z), kmax);
    dd sum(0.0);
    double smallest = 0.0;
    for (double t : terms) {
        sum = sum + t;
        if (t != 0.0) smallest = std::fabs(t);
    }
    if (err_estimate) *err_estimate = smallest;
    return static_cast<double>(sum);
}

// Spectral integral representation for 0 < alpha < 1, 0 < beta <= 1, z < 0:
//   E_{a,b}(z) = integral_0^inf K(r) dr,
//   K(r) = r^((1-b)/a) e^(-r^(1/a)) [r sin(pi(1-b)) - z sin(pi(1-b+a))]
//          / (pi a (r^2 - 2 r z cos(pi a) + z^2)).
// For beta in {1, alpha} the integrand is nonnegative, so the quadrature
// sees no cancellation.
inline double ml_integral(double alpha, double beta, double z, const MLConfig& cfg) {
    const double x = -z;
    const double cpa = cos_pi(alpha);
    const double sin_b = sin_pi(1.0 - beta);
    const double sin_ba = sin_pi(1.0 - beta + alpha);
    const double p = (1.0 - beta) / alpha;
    const double inv_pa = 1.0 / (std::numbers::pi * alpha);
    const double inv_alpha = 1.0 / alpha;
    auto kernel = [=](double r) {
        double den = (r + x * cpa) * (r + x * cpa) + x * x * (1.0 - cpa * cpa);
        double num = r * sin_b + x * sin_ba;
        double weight = (p == 0.0) ? 1.0 : std::pow(r, p);
        return inv_pa * weight * std::exp(-std::pow(r, inv_alpha)) * num / den;
    };
    const double r_max = std::pow(745.0, alpha);
    std::vector<double> breaks{0.0};
    if (cpa < 0.0) {
        double peak = -x * cpa;
        double width = x * std::sqrt(std::max(1.0 - cpa * cpa, 0.0));
        for (double m : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0}) {
            double b = peak + m * width;
            if (b > 0.0 && b < r_max) breaks.push_back(b);
        }
    }
    if (1.0 < r_max) breaks.push_back(1.0);
    breaks.push_back(r_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double rel = std::max(3e-14, 0.05 * cfg.series_tol);
    quad_result q = integrate_adaptive(kernel, breaks, rel, 1e-300, 4000);
    return q.value;
}

} // namespace detail

/// E_{alpha,beta}(z) for 0 < alpha <= 1, beta > 0, z <= 0.
inline double ml_two(double alpha, double beta, double z, const MLConfig& cfg = {}) {
    cfg.validate();
    MLPoint{alpha, beta, z}.validate();
    if (z == 0.0) return beta == 1.0 ? 1.0 : detail::rgamma(beta);
    if (alpha == 1.0 && beta == 1.0) return std::exp(z);
    const double series_bound = std::min(cfg.crossover, std::pow(38.0, alpha));
    if (-z <= series_bound) return detail::ml_series(alpha, beta, z, cfg);
    if (beta > 1.0) {
        // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z brings beta into (0,1],
        // where the integral representation applies without an endpoint
        // singularity.
        return (ml_two(alpha, beta - alpha, z, cfg) - detail::rgamma(beta - alpha)) / z;
    }
    if (alpha >= 0.995) return detail::ml_asymptotic(alpha, beta, z);
    return detail::ml_integral(alpha, beta, z, cfg);
}

/// E_alpha(z) for 0 < alpha <= 1, z <= 0. Values lie in (0, 1].
inline double ml_one(double alpha, double z, const MLConfig& cfg = {}) {
    return ml_two(alpha, 1.0, z, cfg);
}

/// Relaxation kernel E_alpha(-x^alpha) for scaled time x >= 0.
inline double ml_relax(double alpha, double x, const MLConfig& cfg = {}) {
    if (!std::isfinite(x) || x < 0.0)
        throw domain_error("ml_relax: scaled time must be finite and >= 0");
    if (x == 0.0) return 1.0;
    return ml_one(alpha, -std::pow(x, alpha), cfg);
}

/// d/dx E_alpha(-x^alpha) = -x^(alpha-1) E_{alpha,alpha}(-x^alpha), x > 0.
/// The derivative diverges at x = 0 for alpha < 1; at alpha = 1 it is -1.
inline double ml_relax_deriv(double alpha, double x, const MLConfig& cfg = {}) {
    if (!std::isfinite(x) || x < 0.0)
        throw domain_error("ml_relax_deriv: scaled time must be finite and >= 0");
    if (x == 0.0) {
        if (alpha < 1.0)
            throw singularity_error(
                "ml_relax_deriv: derivative diverges at x = 0 for alpha < 1");
        return -1.0;
    }
    return -std::pow(x, alpha - 1.0) * ml_two(alpha, alpha, -std::pow(x, alpha), cfg);
}

} // namespace fracvisc

#endif
