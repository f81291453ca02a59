#pragma once

// JZS (Cauchy prior on the standardized effect) Bayes factor for the
// two-sample t test, with a three-way decision rule.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cet/core.hpp"
#include "cet/detail/quadrature.hpp"
#include "cet/error.hpp"

namespace cet {

// Printed: effective sample size n* = n1 n2 / (n1 + n2) drives both the
// scaling and the exponents. Canonical: exponents use nu = n1 + n2 - 2.
enum class JzsForm { Printed, Canonical };

namespace detail {

struct JzsTerms {
    double n_star;
    double scale;     // divides t^2 inside the power terms
    double exponent;  // power applied to (1 + t^2 / ...)
};

inline JzsTerms jzs_terms(long n1, long n2, JzsForm form) {
    if (n1 < 1 || n2 < 1) throw DomainError("jzs_bf01: group sizes must be positive");
    const double n_star = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
    if (!(n_star > 1.0)) {
        std::ostringstream msg;
        msg << "jzs_bf01: effective sample size n1*n2/(n1+n2) must exceed 1, got " << n_star;
        throw DomainError(msg.str());
    }
    if (form == JzsForm::Printed) return {n_star, n_star - 1.0, 0.5 * n_star};
    const double nu = static_cast<double>(n1 + n2 - 2);
    return {n_star, nu, 0.5 * (nu + 1.0)};
}

}  // namespace detail

// Null-to-alternative Bayes factor B01 from the pooled two-sample t statistic.
// The marginal likelihood under H1 integrates over g in (0, inf), mapped to
// u = g / (1 + g) in (0, 1).
inline double jzs_bf01(double t, long n1, long n2, JzsForm form = JzsForm::Printed,
                       double rel_tol = 1e-10) {
    if (!std::isfinite(t)) throw DomainError("jzs_bf01: t statistic must be finite");
    const auto terms = detail::jzs_terms(n1, n2, form);
    const double t2 = t * t;
    const double log_numerator = -terms.exponent * std::log1p(t2 / terms.scale);
    const double log_inv_sqrt_2pi = -0.5 * std::log(2.0 * std::numbers::pi);

    auto log_ratio = [&](double u) {
        const double g = u / (1.0 - u);
        const double a = 1.0 + terms.n_star * g;
        return -0.5 * std::log(a) - terms.exponent * std::log1p(t2 / (a * terms.scale)) + log_inv_sqrt_2pi -
               1.5 * std::log(g) - 0.5 / g - 2.0 * std::log1p(-u) - log_numerator;
    };

    // Scale by the largest value on a coarse grid so the integrand stays O(1).
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 512; ++i) shift = std::max(shift, log_ratio(i / 512.0));

    auto integrand = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return std::exp(log_ratio(u) - shift);
    };
    detail::QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    opt.initial_intervals = 32;
    opt.max_intervals = 20000;
    const auto integral = detail::integrate(integrand, 0.0, 1.0, opt);
    if (!(integral.value > 0.0)) {
        std::ostringstream msg;
        msg << "jzs_bf01: marginal likelihood integral vanished (t = " << t << ", n1 = " << n1
            << ", n2 = " << n2 << ", " << integral.intervals << " intervals)";
        throw NumericalError(msg.str());
    }
    return std::exp(-shift - std::log(integral.value));
}

// Three-way rule: b01 >= threshold favours H0 (negative), b01 < 1/threshold
// favours H1 (positive), anything between is inconclusive.
inline Decision bf_decision(double b01, double threshold) {
    if (!(threshold > 1.0)) throw DomainError("bf_decision: threshold must exceed 1");
    if (!(b01 > 0.0)) throw DomainError("bf_decision: Bayes factor must be positive");
    if (b01 >= threshold) return Decision::Negative;
    if (b01 < 1.0 / threshold) return Decision::Positive;
    return Decision::Inconclusive;
}

inline double posterior_h0(double b01, double prior_odds = 1.0) {
    if (!(b01 > 0.0) || !(prior_odds > 0.0))
        throw DomainError("posterior_h0: Bayes factor and prior odds must be positive");
    if (std::isinf(b01 * prior_odds)) return 1.0;
    const double odds = b01 * prior_odds;
    return odds / (1.0 + odds);
}

struct BfResult {
    double b01 = 1.0;
    double posterior_h0 = 0.5;
    Decision decision = Decision::Inconclusive;
    double threshold = 3.0;
};

inline BfResult bayes_factor_test(double t, long n1, long n2, double threshold = 3.0, double prior_odds = 1.0,
                                  JzsForm form = JzsForm::Printed) {
    BfResult r;
    r.b01 = jzs_bf01(t, n1, n2, form);
    r.posterior_h0 = posterior_h0(r.b01, prior_odds);
    r.decision = bf_decision(r.b01, threshold);
    r.threshold = threshold;
    return r;
}

inline BfResult bayes_factor_test(const SummaryStats& stats, double threshold = 3.0, double prior_odds = 1.0,
                                  JzsForm form = JzsForm::Printed) {
    if (stats.degenerate()) throw DegenerateDataError();
    return bayes_factor_test(stats.mean_diff() / stats.std_error(), stats.n1, stats.n2, threshold, prior_odds,
                             form);
}

}  // namespace cet
