#pragma once

// Probabilities of the three CET conclusions at a design point, the
// probability of a conclusive ("successful") study, and sample-size searches.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "cet/core.hpp"
#include "cet/distributions.hpp"
#include "cet/error.hpp"

namespace cet {

inline constexpr std::uint64_t kDefaultSeed = 20171001;

// Generator for stream `stream` of a master seed; distinct streams are independent.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

struct McConfig {
    long draws = 100'000;
    std::uint64_t seed = kDefaultSeed;

    void validate() const {
        if (draws < 1) throw InputError("Monte Carlo draw count must be at least 1");
    }
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// True parameters and test settings for which operating characteristics are computed.
struct DesignPoint {
    double mu_d = 0.0;
    double sigma = 1.0;
    long n1 = 2;
    long n2 = 2;
    Margin margin = Margin::symmetric(0.5);
    Alphas alphas;

    static DesignPoint balanced(double mu_d, double sigma, long n_total, Margin margin,
                                Alphas alphas = {}) {
        const long half = (n_total + 1) / 2;
        return {mu_d, sigma, half, half, margin, alphas};
    }

    void validate() const {
        if (n1 < 2 || n2 < 2) throw InputError("design point needs n1, n2 >= 2");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
        if (!std::isfinite(mu_d)) throw DomainError("mu_d must be finite");
    }
    long total() const { return n1 + n2; }
    double size_factor() const { return std::sqrt(1.0 / n1 + 1.0 / n2); }
    double sigma_star() const { return sigma * size_factor(); }
    Df df() const { return Df(static_cast<double>(n1 + n2 - 2)); }
};

struct OperatingChars {
    double pr_positive = 0.0;
    double pr_negative = 0.0;
    double pr_inconclusive = 0.0;
    double mc_stderr = 0.0;
};

// Power of the NHST step; exact via the noncentral t distribution.
inline double pr_positive(const DesignPoint& dp) {
    dp.validate();
    const Df df = dp.df();
    const double t1 = t_quantile(1.0 - 0.5 * dp.alphas.alpha1(), df);
    const Ncp ncp(dp.mu_d / dp.sigma_star());
    return (1.0 - noncentral_t_cdf(t1, df, ncp)) + noncentral_t_cdf(-t1, df, ncp);
}

namespace detail {

// Running mean and variance of the Monte Carlo terms.
class Welford {
public:
    void add(double x) {
        ++count_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }
    McEstimate estimate() const {
        if (count_ < 2) return {mean_, 0.0};
        const double var = m2_ / static_cast<double>(count_ - 1);
        return {mean_, std::sqrt(var / static_cast<double>(count_))};
    }

private:
    long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Pr(lower < mu_hat < upper) for mu_hat ~ N(mu_d, sigma_star^2).
inline double band_probability(double lower, double upper, double mu_d, double sigma_star) {
    if (!(upper > lower)) return 0.0;
    const double zl = (lower - mu_d) / sigma_star;
    const double zu = (upper - mu_d) / sigma_star;
    // Difference of tails on whichever side keeps both terms small.
    if (zl > 0.0) return 0.5 * (std::erfc(zl / std::numbers::sqrt2) - std::erfc(zu / std::numbers::sqrt2));
    return 0.5 * (std::erfc(-zu / std::numbers::sqrt2) - std::erfc(-zl / std::numbers::sqrt2));
}

}  // namespace detail

// Pr(negative) for a fixed margin: average over chi-squared draws of the
// pooled variance of the normal probability that the estimate lands inside
// the negative band [lower_edge(s*), upper_edge(s*)].
inline McEstimate pr_negative_mc(const DesignPoint& dp, const McConfig& mc) {
    dp.validate();
    mc.validate();
    if (dp.margin.is_standardized())
        throw InputError("standardized margins are handled by pr_negative_standardized");
    const double delta = dp.margin.resolve(0.0);
    const Df df = dp.df();
    const RegionClassifier region(delta, dp.alphas, df);
    const double k = dp.size_factor();
    const double sigma_star = dp.sigma_star();
    const double var = dp.sigma * dp.sigma;

    Rng rng = make_rng(mc.seed);
    std::chi_squared_distribution<double> chi2(df.value());
    detail::Welford acc;
    for (long j = 0; j < mc.draws; ++j) {
        const double s_star = std::sqrt(var * chi2(rng) / df.value()) * k;
        acc.add(detail::band_probability(region.lower_edge(s_star), region.upper_edge(s_star), dp.mu_d,
                                         sigma_star));
    }
    return acc.estimate();
}

struct Feasibility {
    bool negative_possible;
    bool inconclusive_possible;
};

// Which conclusions a standardized margin delta = q * s_p permits at all.
inline Feasibility feasibility(double q, long n1, long n2, const Alphas& alphas) {
    if (!(q > 0.0)) throw DomainError("q must be positive");
    if (n1 < 2 || n2 < 2) throw InputError("n1, n2 must be at least 2");
    const Df df(static_cast<double>(n1 + n2 - 2));
    const auto crit = CriticalValues::t(alphas, df);
    const double k = std::sqrt(1.0 / n1 + 1.0 / n2);
    return {q > crit.tost * k, q / k < crit.nhst + crit.tost};
}

// Pr(negative) when the margin is q times the observed pooled SD. The band
// edges scale with s_p, so the estimate is exactly zero when the negative
// region is empty (q <= t*_{alpha2} sqrt(1/n1 + 1/n2)).
inline McEstimate pr_negative_standardized(double q, const DesignPoint& dp, const McConfig& mc) {
    dp.validate();
    mc.validate();
    if (!(q > 0.0)) throw DomainError("q must be positive");
    const Df df = dp.df();
    const auto crit = CriticalValues::t(dp.alphas, df);
    const double k = dp.size_factor();
    const double sigma_star = dp.sigma_star();
    const double inner = q - k * crit.tost;  // > 0 iff negative conclusions are possible
    const double outer = k * crit.nhst;

    Rng rng = make_rng(mc.seed);
    std::chi_squared_distribution<double> chi2(df.value());
    detail::Welford acc;
    for (long j = 0; j < mc.draws; ++j) {
        const double s_p = dp.sigma * std::sqrt(chi2(rng) / df.value());
        const double half = std::max(0.0, std::min(s_p * inner, s_p * outer));
        acc.add(half > 0.0 ? detail::band_probability(-half, half, dp.mu_d, sigma_star) : 0.0);
    }
    return acc.estimate();
}

// Pr(negative) for whatever margin kind the design point carries.
inline McEstimate pr_negative(const DesignPoint& dp, const McConfig& mc) {
    if (const auto* s = std::get_if<Margin::Standardized>(&dp.margin.kind()))
        return pr_negative_standardized(s->q, dp, mc);
    return pr_negative_mc(dp, mc);
}

inline OperatingChars operating_chars(const DesignPoint& dp, const McConfig& mc) {
    const double pos = pr_positive(dp);
    const auto neg = pr_negative(dp, mc);
    OperatingChars oc;
    oc.pr_positive = pos;
    oc.pr_negative = neg.value;
    oc.pr_inconclusive = std::clamp(1.0 - pos - neg.value, 0.0, 1.0);
    oc.mc_stderr = neg.std_error;
    return oc;
}

inline McEstimate pr_inconclusive(const DesignPoint& dp, const McConfig& mc) {
    const auto oc = operating_chars(dp, mc);
    return {oc.pr_inconclusive, oc.mc_stderr};
}

// Probability of a conclusive study when the anticipated effect and the null
// are weighted `prior_weight` and 1 - prior_weight (1/2 each by default).
// Both scenarios share the same chi-squared draws.
inline McEstimate pr_success(double mu_tilde, double sigma_tilde, long n1, long n2, const Margin& margin,
                             const Alphas& alphas, const McConfig& mc, double prior_weight = 0.5) {
    if (!(prior_weight >= 0.0 && prior_weight <= 1.0))
        throw DomainError("prior weight must lie in [0, 1]");
    const DesignPoint alt{mu_tilde, sigma_tilde, n1, n2, margin, alphas};
    const DesignPoint null{0.0, sigma_tilde, n1, n2, margin, alphas};
    const auto inc_alt = pr_inconclusive(alt, mc);
    const auto inc_null = pr_inconclusive(null, mc);
    return {1.0 - prior_weight * inc_alt.value - (1.0 - prior_weight) * inc_null.value,
            prior_weight * inc_alt.std_error + (1.0 - prior_weight) * inc_null.std_error};
}

struct SampleSizeResult {
    long n = 0;                // total, n1 = n2 = n / 2
    double achieved = 0.0;     // criterion at n
    double previous = std::numeric_limits<double>::quiet_NaN();  // criterion at n - 2
    int evaluations = 0;
    bool non_monotone = false;  // a larger n scored clearly lower than a smaller one
};

struct SearchOptions {
    long max_n = 1'000'000;
};

namespace detail {

struct Evaluation {
    long n;
    double value;
    double std_error;
};

// Smallest even n >= 4 with f(n) >= target, by doubling then bisection over
// even totals. Flags non-monotonicity when an evaluated larger n falls more
// than three combined standard errors below a smaller one.
template <class F>
SampleSizeResult search_even_n(double target, F&& f, const SearchOptions& opt, const char* label) {
    std::vector<Evaluation> seen;
    auto eval = [&](long n) {
        const McEstimate e = f(n);
        seen.push_back({n, e.value, e.std_error});
        return e.value;
    };
    auto finish = [&](long n, double achieved, double previous) {
        SampleSizeResult r;
        r.n = n;
        r.achieved = achieved;
        r.previous = previous;
        r.evaluations = static_cast<int>(seen.size());
        for (const auto& a : seen)
            for (const auto& b : seen)
                if (a.n < b.n && a.value > b.value + 3.0 * (a.std_error + b.std_error)) r.non_monotone = true;
        return r;
    };

    long lo = 2;  // half-sizes; f(2 * lo) < target is established lazily
    long hi = 2;
    double hi_value = eval(2 * hi);
    if (hi_value >= target) return finish(4, hi_value, std::numeric_limits<double>::quiet_NaN());
    double lo_value = hi_value;
    while (hi_value < target) {
        lo = hi;
        lo_value = hi_value;
        if (2 * hi >= opt.max_n) {
            double best = -1.0;
            long best_n = 0;
            for (const auto& e : seen)
                if (e.value > best) { best = e.value; best_n = e.n; }
            std::ostringstream msg;
            msg << label << ": target " << target << " not reached for n <= " << opt.max_n
                << " (best " << best << " at n = " << best_n << ")";
            throw SearchFailure(msg.str(), best, best_n);
        }
        hi = std::min(2 * hi, opt.max_n / 2);
        hi_value = eval(2 * hi);
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        const double v = eval(2 * mid);
        if (v >= target) {
            hi = mid;
            hi_value = v;
        } else {
            lo = mid;
            lo_value = v;
        }
    }
    return finish(2 * hi, hi_value, lo_value);
}

}  // namespace detail

// Smallest balanced total n whose NHST power reaches `target`.
inline SampleSizeResult sample_size_for_power(double target, double mu_tilde, double sigma_tilde,
                                              const Alphas& alphas, const SearchOptions& opt = {}) {
    detail::require_probability(target, "target power");
    if (mu_tilde == 0.0) throw InputError("power search needs a nonzero anticipated effect");
    if (!(sigma_tilde > 0.0)) throw DomainError("sigma must be positive");
    return detail::search_even_n(
        target,
        [&](long n) {
            const DesignPoint dp{mu_tilde, sigma_tilde, n / 2, n / 2, Margin::symmetric(1.0), alphas};
            return McEstimate{pr_positive(dp), 0.0};
        },
        opt, "sample_size_for_power");
}

// Smallest balanced total n whose probability of success reaches `target`.
// Every candidate uses the same seed (common random numbers).
inline SampleSizeResult sample_size_for_success(double target, double mu_tilde, double sigma_tilde,
                                                const Margin& margin, const Alphas& alphas,
                                                const McConfig& mc, const SearchOptions& opt = {},
                                                double prior_weight = 0.5) {
    detail::require_probability(target, "target probability of success");
    if (!(sigma_tilde > 0.0)) throw DomainError("sigma must be positive");
    return detail::search_even_n(
        target,
        [&](long n) { return pr_success(mu_tilde, sigma_tilde, n / 2, n / 2, margin, alphas, mc, prior_weight); },
        opt, "sample_size_for_success");
}

// Joint draws of (mean difference, s*) under a design point.
struct StatisticDraw {
    double mu_hat;
    double s_star;
};

inline std::vector<StatisticDraw> draw_statistics(const DesignPoint& dp, const McConfig& mc) {
    dp.validate();
    mc.validate();
    const Df df = dp.df();
    Rng rng = make_rng(mc.seed);
    std::chi_squared_distribution<double> chi2(df.value());
    std::normal_distribution<double> normal(dp.mu_d, dp.sigma_star());
    std::vector<StatisticDraw> draws;
    draws.reserve(static_cast<std::size_t>(mc.draws));
    for (long j = 0; j < mc.draws; ++j) {
        const double mu_hat = normal(rng);
        const double s_star = dp.sigma * std::sqrt(chi2(rng) / df.value()) * dp.size_factor();
        draws.push_back({mu_hat, s_star});
    }
    return draws;
}

// Region frequencies of a set of draws under the two-sample decision regions.
inline OperatingChars region_frequencies(std::span<const StatisticDraw> draws, const RegionClassifier& region) {
    long counts[3] = {0, 0, 0};
    for (const auto& d : draws) ++counts[static_cast<int>(region(d.mu_hat, d.s_star))];
    const double m = static_cast<double>(draws.size());
    OperatingChars oc;
    oc.pr_positive = counts[0] / m;
    oc.pr_negative = counts[1] / m;
    oc.pr_inconclusive = counts[2] / m;
    double var = 0.0;
    for (double p : {oc.pr_positive, oc.pr_negative, oc.pr_inconclusive}) var = std::max(var, p * (1.0 - p));
    oc.mc_stderr = std::sqrt(var / m);
    return oc;
}

}  // namespace cet
