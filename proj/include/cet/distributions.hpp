#pragma once

// Probability kernels used by the CET procedures: normal, Student t and
// noncentral t distribution functions, t quantiles, and chi-squared sampling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cet/detail/quadrature.hpp"
#include "cet/error.hpp"

namespace cet {

// Degrees of freedom. Real-valued so that non-integer df can be supported.
class Df {
public:
    explicit Df(double value) : value_(value) {
        if (!(value > 0.0) || std::isnan(value)) {
            std::ostringstream msg;
            msg << "degrees of freedom must be positive, got " << value;
            throw DomainError(msg.str());
        }
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

// Noncentrality parameter of the noncentral t distribution.
class Ncp {
public:
    explicit Ncp(double value) : value_(value) {
        if (!std::isfinite(value)) throw DomainError("noncentrality parameter must be finite");
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

// Engine used for every Monte Carlo computation in the library.
using Rng = std::mt19937_64;

namespace detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
    return std::lgamma(x);
#endif
}

// Remainder of Stirling's series for log Gamma(z), accurate for z >= 20.
inline double stirling_correction(double z) {
    const double r = 1.0 / (z * z);
    return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / z;
}

// log Gamma(z) - log Gamma(z + s) without the cancellation between two large values.
inline double log_gamma_ratio(double z, double s) {
    const double zs = z + s;
    return (z - 0.5) * std::log1p(-s / zs) - s * std::log(zs) + s + stirling_correction(z) -
           stirling_correction(zs);
}

inline double log_beta(double a, double b) {
    const double big = std::max(a, b);
    const double small = std::min(a, b);
    if (big < 20.0) return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
    return log_gamma(small) + log_gamma_ratio(big, small);
}

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 10000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

// Regularized incomplete beta I_x(a, b); y = 1 - x is passed separately to avoid cancellation.
inline double incomplete_beta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    // Whichever of x, y is near 1 is less accurate than 1 minus the other.
    const double log_x = x > 0.5 ? std::log1p(-y) : std::log(x);
    const double log_y = y > 0.5 ? std::log1p(-x) : std::log(y);
    const double log_front = a * log_x + b * log_y - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

// Upper tail Pr(T > t) for t >= 0.
inline double t_upper_tail(double t, double df) {
    const double t2 = t * t;
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    return 0.5 * incomplete_beta(0.5 * df, 0.5, x, y);
}

inline double t_pdf(double t, double df) {
    const double log_norm = -log_beta(0.5 * df, 0.5) - 0.5 * std::log(df);
    return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation followed by one Halley refinement step.
inline double standard_normal_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = standard_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

inline void require_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream msg;
        msg << what << " must lie strictly inside (0, 1), got " << p;
        throw DomainError(msg.str());
    }
}

// Lenth's series (AS 243) for the noncentral t cdf; accurate for |ncp| up to about 37.
inline double noncentral_t_series(double t, double df, double delta) {
    constexpr double errmax = 1e-14;
    constexpr int itrmax = 20000;

    const bool negate = t < 0.0;
    const double tt = negate ? -t : t;
    const double del = negate ? -delta : delta;

    double tnc = 0.0;
    const double x = tt * tt / (tt * tt + df);
    if (x > 0.0) {
        const double lambda = del * del;
        double p = 0.5 * std::exp(-0.5 * lambda);
        double q = std::sqrt(2.0 / std::numbers::pi) * p * del;
        double s = 0.5 - p;
        if (s < 1e-7) s = -0.5 * std::expm1(-0.5 * lambda);
        double a = 0.5;
        const double b = 0.5 * df;
        const double one_minus_x = df / (tt * tt + df);
        const double rxb = std::exp(b * std::log1p(-x));
        const double albeta = log_beta(0.5, b);
        double xodd = incomplete_beta(a, b, x, one_minus_x);
        double godd = 2.0 * rxb * std::exp(a * std::log(x) - albeta);
        const double bx = b * x;
        double xeven = bx < std::numeric_limits<double>::epsilon() ? bx : 1.0 - rxb;
        double geven = bx * rxb;
        tnc = p * xodd + q * xeven;
        for (int en = 1; en <= itrmax; ++en) {
            a += 1.0;
            xodd -= godd;
            xeven -= geven;
            godd *= x * (a + b - 1.0) / a;
            geven *= x * (a + b - 0.5) / (a + 0.5);
            p *= lambda / (2.0 * en);
            q *= lambda / (2.0 * en + 1.0);
            s -= p;
            tnc += p * xodd + q * xeven;
            const double errbd = 2.0 * s * (xodd - godd);
            if (std::abs(errbd) < errmax && en > lambda / 2.0) break;
        }
    }
    tnc += standard_normal_cdf(-del);
    tnc = std::clamp(tnc, 0.0, 1.0);
    return negate ? 1.0 - tnc : tnc;
}

// Mixture representation Pr(Z - ncp <= t W) with W = sqrt(chi2_df / df), integrated over W.
inline double noncentral_t_mixture(double t, double df, double delta) {
    const double log_norm = std::log(2.0) + 0.5 * df * std::log(0.5 * df) - log_gamma(0.5 * df);
    auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double log_density = log_norm + (df - 1.0) * std::log(w) - 0.5 * df * w * w;
        return standard_normal_cdf(t * w - delta) * std::exp(log_density);
    };
    const double upper = 1.0 + 40.0 / std::sqrt(df) + 10.0 / df;
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-15;
    opt.initial_intervals = 64;
    return std::clamp(integrate(integrand, 0.0, upper, opt).value, 0.0, 1.0);
}

}  // namespace detail

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
    if (!(sd > 0.0)) throw DomainError("normal_cdf: standard deviation must be positive");
    return detail::standard_normal_cdf((x - mean) / sd);
}

inline double normal_quantile(double p, double mean = 0.0, double sd = 1.0) {
    detail::require_probability(p, "normal_quantile: probability");
    if (!(sd > 0.0)) throw DomainError("normal_quantile: standard deviation must be positive");
    return mean + sd * detail::standard_normal_quantile(p);
}

inline double t_cdf(double x, Df df) {
    if (std::isnan(x)) throw DomainError("t_cdf: argument is NaN");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double tail = detail::t_upper_tail(std::abs(x), df.value());
    return x < 0.0 ? tail : 1.0 - tail;
}

// Inverse of t_cdf by safeguarded Newton iteration on the tail probability.
inline double t_quantile(double p, Df df) {
    detail::require_probability(p, "t_quantile: probability");
    if (p == 0.5) return 0.0;
    const double v = df.value();
    const double tail = p < 0.5 ? p : 1.0 - p;
    const double sign = p < 0.5 ? -1.0 : 1.0;

    if (v == 1.0) return sign * std::tan(std::numbers::pi * (0.5 - tail));

    // Bracket [lo, hi] with upper_tail(lo) > tail > upper_tail(hi).
    double lo = 0.0;
    double hi = std::max(1.0, -detail::standard_normal_quantile(tail));
    while (detail::t_upper_tail(hi, v) > tail) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("t_quantile: failed to bracket the root");
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 300; ++iter) {
        const double f = detail::t_upper_tail(x, v) - tail;
        if (f == 0.0) break;
        if (f > 0.0) lo = x; else hi = x;
        const double slope = -detail::t_pdf(x, v);
        double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            x = next;
            break;
        }
        x = next;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return sign * x;
}

inline double noncentral_t_cdf(double x, Df df, Ncp ncp) {
    if (std::isnan(x)) throw DomainError("noncentral_t_cdf: argument is NaN");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    if (ncp.value() == 0.0) return t_cdf(x, df);
    if (std::abs(ncp.value()) <= 37.0) {
        return detail::noncentral_t_series(x, df.value(), ncp.value());
    }
    return detail::noncentral_t_mixture(x, df.value(), ncp.value());
}

// One chi-squared variate; advances only the supplied generator.
inline double chi2_sample(Df df, Rng& rng) {
    return std::chi_squared_distribution<double>(df.value())(rng);
}

}  // namespace cet
