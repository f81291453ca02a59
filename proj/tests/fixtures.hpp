#pragma once

// The thirteen confidence-interval configurations of the CET taxonomy at
// n1 = n2 = 45, delta = 0.5, alpha1 = 0.05, alpha2 = 0.10. With df = 88 the
// critical values are t1 = 1.98729 (wide interval) and t2 = 1.29125 (narrow).

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cet/core.hpp"

namespace cet::test {

struct TaxonomyCase {
    char label;
    double mu_hat;
    double s_star;
    Decision expected;
    const char* picture;
};

inline const std::vector<TaxonomyCase>& taxonomy_cases() {
    static const std::vector<TaxonomyCase> cases = {
        {'a', 1.00, 0.10, Decision::Positive, "wide CI [0.80, 1.20] entirely beyond the margin"},
        {'b', 0.25, 0.05, Decision::Positive, "wide CI [0.15, 0.35] excludes 0, inside the margin"},
        {'c', 0.50, 0.10, Decision::Positive, "wide CI [0.30, 0.70] excludes 0, straddles +delta"},
        {'d', -0.80, 0.25, Decision::Positive, "wide CI [-1.30, -0.30] excludes 0, straddles -delta"},
        {'e', 0.00, 0.10, Decision::Negative, "narrow CI [-0.13, 0.13] centred on 0"},
        {'f', 0.15, 0.10, Decision::Negative, "wide CI just covers 0, narrow CI inside the margin"},
        {'g', -0.20, 0.15, Decision::Negative, "narrow CI [-0.39, -0.01] inside the margin"},
        {'h', 0.00, 0.40, Decision::Inconclusive, "narrow CI [-0.52, 0.52] overhangs both bounds"},
        {'i', 0.30, 0.20, Decision::Inconclusive, "narrow CI overhangs +delta"},
        {'j', -0.30, 0.20, Decision::Inconclusive, "narrow CI overhangs -delta"},
        {'k', 0.10, 0.50, Decision::Inconclusive, "wide CI covers 0 and both bounds"},
        {'l', 0.60, 0.40, Decision::Inconclusive, "estimate beyond +delta, not significant"},
        {'m', -0.60, 0.35, Decision::Inconclusive, "estimate beyond -delta, not significant"},
    };
    return cases;
}

inline constexpr long kTaxonomyGroupSize = 45;
inline constexpr double kTaxonomyDelta = 0.5;

inline SummaryStats taxonomy_stats(const TaxonomyCase& c) {
    const long n = kTaxonomyGroupSize;
    const double k = std::sqrt(2.0 / n);
    return SummaryStats::from_moments(n, n, c.mu_hat, 0.0, c.s_star / k);
}

// n values with mean exactly `mean` and sample SD `sd` (up to rounding):
// a centred, rescaled arithmetic sequence.
inline std::vector<double> exact_sample(long n, double mean, double sd) {
    std::vector<double> z(static_cast<std::size_t>(n));
    std::iota(z.begin(), z.end(), 0.0);
    const double centre = 0.5 * (n - 1);
    double ss = 0.0;
    for (double& v : z) {
        v -= centre;
        ss += v * v;
    }
    const double scale = sd / std::sqrt(ss / (n - 1));
    for (double& v : z) v = mean + v * scale;
    return z;
}

}  // namespace cet::test
