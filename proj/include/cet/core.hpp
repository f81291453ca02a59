#pragma once

// Conditional equivalence testing: NHST first, then (if not significant) TOST.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string_view>
#include <variant>
#include <vector>

#include "cet/distributions.hpp"
#include "cet/error.hpp"

namespace cet {

enum class Decision { Positive, Negative, Inconclusive };

inline std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::Positive: return "positive";
        case Decision::Negative: return "negative";
        case Decision::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

inline std::optional<Decision> parse_decision(std::string_view s) {
    if (s == "positive") return Decision::Positive;
    if (s == "negative") return Decision::Negative;
    if (s == "inconclusive") return Decision::Inconclusive;
    return std::nullopt;
}

// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool within(double lower, double upper) const { return lower <= lo && hi <= upper; }
    double width() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Error rates: alpha1 caps the type I error of the NHST step, alpha2 caps the
// type E error (erroneously concluding equivalence) of the TOST step.
class Alphas {
public:
    Alphas() = default;
    Alphas(double alpha1, double alpha2) : alpha1_(alpha1), alpha2_(alpha2) {
        detail::require_probability(alpha1, "alpha1");
        detail::require_probability(alpha2, "alpha2");
    }

    static Alphas standard() { return {0.05, 0.10}; }
    static Alphas strict() { return {0.01, 0.05}; }

    double alpha1() const noexcept { return alpha1_; }
    double alpha2() const noexcept { return alpha2_; }
    friend bool operator==(const Alphas&, const Alphas&) = default;

private:
    double alpha1_ = 0.05;
    double alpha2_ = 0.10;
};

// Critical values t*_{alpha1/2} and t*_{alpha2} for a given df.
struct CriticalValues {
    double nhst;  // upper alpha1/2 point
    double tost;  // upper alpha2 point

    static CriticalValues t(const Alphas& a, Df df) {
        return {t_quantile(1.0 - 0.5 * a.alpha1(), df), t_quantile(1.0 - a.alpha2(), df)};
    }
    static CriticalValues normal(const Alphas& a) {
        return {normal_quantile(1.0 - 0.5 * a.alpha1()), normal_quantile(1.0 - a.alpha2())};
    }
};

// Equivalence margin. Symmetric raw margins [-delta, delta] serve the
// two-sample test; general [lower, upper] margins serve the CI form; a
// standardized margin resolves to q * s_p once the pooled SD is known.
class Margin {
public:
    struct RawSymmetric { double delta; };
    struct General { double lower; double upper; };
    struct Standardized { double q; };
    using Kind = std::variant<RawSymmetric, General, Standardized>;

    static Margin symmetric(double delta) {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw DomainError("equivalence margin delta must be positive and finite");
        return Margin(RawSymmetric{delta});
    }
    static Margin general(double lower, double upper) {
        if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
            throw DomainError("general equivalence margin requires finite lower < upper");
        return Margin(General{lower, upper});
    }
    // Symmetric interval around the null value theta0.
    static Margin around(double theta0, double delta) {
        if (!(delta > 0.0)) throw DomainError("equivalence margin delta must be positive");
        return general(theta0 - delta, theta0 + delta);
    }
    static Margin standardized(double q) {
        if (!(q > 0.0) || !std::isfinite(q))
            throw DomainError("standardized margin multiplier q must be positive and finite");
        return Margin(Standardized{q});
    }

    const Kind& kind() const noexcept { return kind_; }
    bool is_standardized() const { return std::holds_alternative<Standardized>(kind_); }

    // Half-width delta for the symmetric two-sample procedure.
    double resolve(double pooled_sd) const {
        if (const auto* raw = std::get_if<RawSymmetric>(&kind_)) return raw->delta;
        if (const auto* std_margin = std::get_if<Standardized>(&kind_)) return std_margin->q * pooled_sd;
        const auto& g = std::get<General>(kind_);
        if (g.lower != -g.upper)
            throw InputError("asymmetric margins are only supported by the general CI procedure");
        return g.upper;
    }

    // Bounds [lower, upper] around theta0 for the CI procedure.
    Interval bounds(double theta0) const {
        if (const auto* raw = std::get_if<RawSymmetric>(&kind_))
            return {theta0 - raw->delta, theta0 + raw->delta};
        if (const auto* g = std::get_if<General>(&kind_)) return {g->lower, g->upper};
        throw InputError("standardized margin needs a pooled SD; use the two-sample procedure");
    }

private:
    explicit Margin(Kind kind) : kind_(kind) {}
    Kind kind_;
};

// Sufficient statistics of a two-sample dataset.
struct SummaryStats {
    long n1 = 0;
    long n2 = 0;
    double mean1 = 0.0;
    double mean2 = 0.0;
    double pooled_sd = 0.0;

    double mean_diff() const { return mean1 - mean2; }
    double size_factor() const { return std::sqrt(1.0 / n1 + 1.0 / n2); }
    double std_error() const { return pooled_sd * size_factor(); }
    long total() const { return n1 + n2; }
    Df df() const { return Df(static_cast<double>(n1 + n2 - 2)); }
    bool degenerate() const { return pooled_sd == 0.0; }

    // Build from summary values directly (means difference and pooled SD suffice).
    static SummaryStats from_moments(long n1, long n2, double mean1, double mean2, double pooled_sd) {
        if (n1 < 2 || n2 < 2) throw InputError("each group needs at least two observations");
        if (!(pooled_sd >= 0.0) || !std::isfinite(pooled_sd))
            throw InputError("pooled standard deviation must be finite and nonnegative");
        return {n1, n2, mean1, mean2, pooled_sd};
    }
};

inline SummaryStats summarize(std::span<const double> sample1, std::span<const double> sample2) {
    if (sample1.size() < 2 || sample2.size() < 2) {
        std::ostringstream msg;
        msg << "each group needs at least two observations (got " << sample1.size() << " and "
            << sample2.size() << ")";
        throw InputError(msg.str());
    }
    auto moments = [](std::span<const double> xs) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        const double mean = sum / static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss};
    };
    const auto [m1, ss1] = moments(sample1);
    const auto [m2, ss2] = moments(sample2);
    const long n1 = static_cast<long>(sample1.size());
    const long n2 = static_cast<long>(sample2.size());
    const double pooled_sd = std::sqrt((ss1 + ss2) / static_cast<double>(n1 + n2 - 2));
    if (!std::isfinite(pooled_sd) || !std::isfinite(m1) || !std::isfinite(m2))
        throw InputError("samples contain non-finite values");
    return {n1, n2, m1, m2, pooled_sd};
}

struct CetOutcome {
    Decision decision = Decision::Inconclusive;
    double p1 = 1.0;     // two-sided NHST p-value
    double p2 = 1.0;     // TOST p-value, reported for every outcome
    double p_cet = 0.0;  // p1 if positive, else 1 - p2
    Interval ci_wide;    // (1 - alpha1) interval
    Interval ci_narrow;  // (1 - 2 alpha2) interval
    double resolved_delta = 0.0;
    double t_stat = 0.0;
};

namespace detail {

// Steps 2 and 4 of the two-sample procedure from the three t statistics.
// Ties fall through: strict inequalities in both steps.
inline Decision decide(double t, double t_lower, double t_upper, const CriticalValues& crit) {
    if (std::abs(t) > crit.nhst) return Decision::Positive;
    if (t_lower > crit.tost && t_upper < -crit.tost) return Decision::Negative;
    return Decision::Inconclusive;
}

struct TStats {
    double t, t_lower, t_upper;
};

inline TStats t_statistics(double mean_diff, double std_error, double delta) {
    return {mean_diff / std_error, (mean_diff + delta) / std_error, (mean_diff - delta) / std_error};
}

}  // namespace detail

// Two-sample CET with critical values already computed for df = n1 + n2 - 2.
inline CetOutcome cet_two_sample(const SummaryStats& stats, const Margin& margin, const CriticalValues& crit) {
    if (stats.n1 < 2 || stats.n2 < 2) throw InputError("each group needs at least two observations");
    if (stats.degenerate()) throw DegenerateDataError();
    const double delta = margin.resolve(stats.pooled_sd);
    const Df df = stats.df();
    const double mu_hat = stats.mean_diff();
    const double se = stats.std_error();
    const auto ts = detail::t_statistics(mu_hat, se, delta);

    CetOutcome out;
    out.t_stat = ts.t;
    out.resolved_delta = delta;
    out.p1 = 2.0 * t_cdf(-std::abs(ts.t), df);
    out.p2 = std::max(t_cdf(-ts.t_lower, df), t_cdf(ts.t_upper, df));
    out.decision = detail::decide(ts.t, ts.t_lower, ts.t_upper, crit);
    out.p_cet = out.decision == Decision::Positive ? out.p1 : 1.0 - out.p2;
    out.ci_wide = {mu_hat - crit.nhst * se, mu_hat + crit.nhst * se};
    out.ci_narrow = {mu_hat - crit.tost * se, mu_hat + crit.tost * se};
    return out;
}

// Two-sample CET (pooled-variance t tests).
inline CetOutcome cet_two_sample(const SummaryStats& stats, const Margin& margin, const Alphas& alphas) {
    if (stats.n1 < 2 || stats.n2 < 2) throw InputError("each group needs at least two observations");
    return cet_two_sample(stats, margin, CriticalValues::t(alphas, stats.df()));
}

// CI form for a generic estimate with standard error `se`; df = nullopt uses
// normal intervals. Intervals are closed on both ends.
inline CetOutcome cet_general(double theta_hat, double se, std::optional<Df> df, double theta0,
                              const Margin& margin, const Alphas& alphas) {
    if (!(se > 0.0) || !std::isfinite(se)) throw DomainError("standard error must be positive");
    const Interval bounds = margin.bounds(theta0);
    if (!(bounds.lo < theta0 && theta0 < bounds.hi)) {
        std::ostringstream msg;
        msg << "equivalence margin [" << bounds.lo << ", " << bounds.hi
            << "] must bracket the null value " << theta0;
        throw InputError(msg.str());
    }
    const auto crit = df ? CriticalValues::t(alphas, *df) : CriticalValues::normal(alphas);
    auto cdf = [&](double x) { return df ? t_cdf(x, *df) : normal_cdf(x); };

    CetOutcome out;
    out.t_stat = (theta_hat - theta0) / se;
    out.resolved_delta = 0.5 * bounds.width();
    out.ci_wide = {theta_hat - crit.nhst * se, theta_hat + crit.nhst * se};
    out.ci_narrow = {theta_hat - crit.tost * se, theta_hat + crit.tost * se};
    out.p1 = 2.0 * cdf(-std::abs(out.t_stat));
    out.p2 = std::max(cdf(-(theta_hat - bounds.lo) / se), cdf((theta_hat - bounds.hi) / se));
    if (!out.ci_wide.contains(theta0)) {
        out.decision = Decision::Positive;
    } else if (out.ci_narrow.within(bounds.lo, bounds.hi)) {
        out.decision = Decision::Negative;
    } else {
        out.decision = Decision::Inconclusive;
    }
    out.p_cet = out.decision == Decision::Positive ? out.p1 : 1.0 - out.p2;
    return out;
}

// Corners of the negative region in the (mean difference, s*) plane.
struct Diamond {
    struct Point { double mu_hat; double s_star; };
    Point bottom, left, top, right;
};

// Decision regions of the two-sample test at fixed df and margin, in terms of
// the estimated difference and its standard error s* = s_p sqrt(1/n1 + 1/n2).
class RegionClassifier {
public:
    RegionClassifier(double delta, const Alphas& alphas, Df df)
        : delta_(delta), crit_(CriticalValues::t(alphas, df)) {
        if (!(delta > 0.0)) throw DomainError("classify_region: delta must be positive");
    }

    Decision operator()(double mu_hat, double s_star) const {
        const auto ts = detail::t_statistics(mu_hat, s_star, delta_);
        return detail::decide(ts.t, ts.t_lower, ts.t_upper, crit_);
    }

    // Left and right edges of the negative region at a given s*; equal (zero) when empty.
    double lower_edge(double s_star) const {
        return std::min(0.0, std::max(s_star * crit_.tost - delta_, -s_star * crit_.nhst));
    }
    double upper_edge(double s_star) const {
        return std::max(0.0, std::min(delta_ - s_star * crit_.tost, s_star * crit_.nhst));
    }

    Diamond diamond() const {
        const double t1 = crit_.nhst;
        const double t2 = crit_.tost;
        const double waist = delta_ / (t1 + t2);
        const double half_width = delta_ / (t2 / t1 + 1.0);
        return {{0.0, 0.0}, {-half_width, waist}, {0.0, delta_ / t2}, {half_width, waist}};
    }

    const CriticalValues& critical_values() const noexcept { return crit_; }
    double delta() const noexcept { return delta_; }

private:
    double delta_;
    CriticalValues crit_;
};

inline Decision classify_region(double mu_hat, double s_star, double delta, const Alphas& alphas, Df df) {
    if (!(s_star > 0.0)) throw DomainError("classify_region: s* must be positive");
    return RegionClassifier(delta, alphas, df)(mu_hat, s_star);
}

// Least equivalent allowable difference: the smallest delta at which the TOST
// step would declare equivalence, max(|lower|, |upper|) of the (1 - 2 alpha2) CI.
inline double lead_margin(const SummaryStats& stats, double alpha2) {
    if (stats.degenerate()) throw DegenerateDataError();
    detail::require_probability(alpha2, "alpha2");
    const double t2 = t_quantile(1.0 - alpha2, stats.df());
    return std::abs(stats.mean_diff()) + t2 * stats.std_error();
}

struct CurvePoint {
    double delta;
    double p2;
};

// TOST p-value as a function of the margin half-width.
inline std::vector<CurvePoint> equivalence_curve(const SummaryStats& stats, std::span<const double> deltas) {
    if (deltas.empty()) throw InputError("equivalence_curve: delta grid is empty");
    if (stats.degenerate()) throw DegenerateDataError();
    const Df df = stats.df();
    const double se = stats.std_error();
    const double mu_hat = stats.mean_diff();
    std::vector<CurvePoint> curve;
    curve.reserve(deltas.size());
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw DomainError("equivalence_curve: deltas must be positive");
        const auto ts = detail::t_statistics(mu_hat, se, delta);
        curve.push_back({delta, std::max(t_cdf(-ts.t_lower, df), t_cdf(ts.t_upper, df))});
    }
    return curve;
}

}  // namespace cet
