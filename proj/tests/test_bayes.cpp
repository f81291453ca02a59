#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cet/bayes.hpp"

using namespace cet;

namespace {

// Trapezoid rule in x = log g on a wide fixed grid; a different change of
// variables and step scheme from the library's adaptive rule.
double bf01_log_trapezoid(double t, double n1, double n2) {
    const double ns = n1 * n2 / (n1 + n2);
    const double t2 = t * t;
    const double num = std::pow(1 + t2 / (ns - 1), -ns / 2);
    const double lo = -12.0, hi = 25.0;
    const int steps = 200000;
    const double h = (hi - lo) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = lo + i * h;
        const double g = std::exp(x);
        const double a = 1 + ns * g;
        const double f = std::pow(a, -0.5) * std::pow(1 + t2 / (a * (ns - 1)), -ns / 2) /
                         std::sqrt(2 * std::numbers::pi) * std::pow(g, -1.5) * std::exp(-0.5 / g) * g;
        sum += (i == 0 || i == steps ? 0.5 : 1.0) * f;
    }
    return num / (sum * h);
}

double bf_at_quarter_effect(long n) {
    // mu_hat = 0.25, s_p = 1, balanced groups: t = 0.25 / sqrt(4 / n).
    const long half = n / 2;
    return jzs_bf01(0.25 / std::sqrt(2.0 / half), half, half);
}

}  // namespace

TEST(JzsBf01, FrozenValues) {
    // mpmath quad at 30 digits of the printed and canonical integrals.
    EXPECT_NEAR(jzs_bf01(0.0, 50, 50), 6.5003187452417445, 1e-9);
    EXPECT_NEAR(jzs_bf01(1.7, 50, 50), 1.7291690153872157, 1e-9);
    EXPECT_NEAR(jzs_bf01(2.5, 20, 30), 0.44490845591245553, 1e-10);
    EXPECT_NEAR(jzs_bf01(0.0, 5, 5), 2.5165930019387587, 1e-9);
    EXPECT_NEAR(jzs_bf01(4.0, 200, 200), 0.0081569945336203296, 1e-12);
    EXPECT_NEAR(jzs_bf01(1.7, 50, 50, JzsForm::Canonical), 1.6953734683649654, 1e-9);
    EXPECT_NEAR(jzs_bf01(2.5, 20, 30, JzsForm::Canonical), 0.32660255691131357, 1e-10);
    EXPECT_NEAR(jzs_bf01(4.0, 200, 200, JzsForm::Canonical), 0.0056161982433029521, 1e-12);
}

TEST(JzsBf01, DualQuadratureOracle) {
    for (double t : {0.0, 0.8, 2.0, 3.5}) {
        const double ref = bf01_log_trapezoid(t, 50, 50);
        EXPECT_NEAR(jzs_bf01(t, 50, 50), ref, 1e-7 * ref) << t;
    }
}

TEST(JzsBf01, SymmetricInT) {
    for (double t : {0.3, 1.7, 5.0}) EXPECT_DOUBLE_EQ(jzs_bf01(t, 40, 70), jzs_bf01(-t, 40, 70));
}

TEST(JzsBf01, QuadratureStable) {
    for (double t : {0.0, 1.0, 3.0, 8.0})
        for (long n : {4L, 60L, 2500L}) {
            const double coarse = jzs_bf01(t, n, n, JzsForm::Printed, 1e-7);
            const double fine = jzs_bf01(t, n, n, JzsForm::Printed, 1e-12);
            EXPECT_NEAR(coarse, fine, 1e-5 * fine) << t << " " << n;
        }
}

TEST(JzsBf01, InconclusiveBandForQuarterEffect) {
    for (long n = 114; n <= 494; n += 2) {
        const double b = bf_at_quarter_effect(n);
        EXPECT_GT(b, 1.0 / 3.0) << n;
        EXPECT_LT(b, 3.0) << n;
    }
    EXPECT_GE(bf_at_quarter_effect(110), 3.0);
    EXPECT_LE(bf_at_quarter_effect(500), 1.0 / 3.0);
}

TEST(JzsBf01, NullEstimateEvidenceGrowsWithN) {
    double prev = 0.0;
    for (long n = 20; n <= 5000; n += 20) {
        const double b = jzs_bf01(0.0, n / 2, n / 2);
        EXPECT_GT(b, prev) << n;
        prev = b;
    }
}

TEST(JzsBf01, SmallEffectRisesThenFalls) {
    for (double mu : {0.1, 0.25}) {
        int sign_changes = 0;
        double prev_b = jzs_bf01(mu / std::sqrt(2.0 / 10), 10, 10);
        double prev_diff = 1.0;
        double last = prev_b;
        for (long n = 24; n <= 5000; n += 4) {
            const long half = n / 2;
            const double b = jzs_bf01(mu / std::sqrt(2.0 / half), half, half);
            const double diff = b - prev_b;
            if ((diff > 0) != (prev_diff > 0)) ++sign_changes;
            prev_diff = diff;
            prev_b = b;
            last = b;
        }
        EXPECT_EQ(sign_changes, 1) << mu;
        EXPECT_LT(last, 1.0 / 3.0) << mu;
    }
}

TEST(JzsBf01, Errors) {
    EXPECT_THROW(jzs_bf01(1.0, 2, 2), DomainError);  // n* = 1
    EXPECT_THROW(jzs_bf01(std::nan(""), 10, 10), DomainError);
    EXPECT_NO_THROW(jzs_bf01(1.0, 3, 3));
}

TEST(BfDecision, ThreeWayRule) {
    EXPECT_EQ(bf_decision(1.0, 3.0), Decision::Inconclusive);
    EXPECT_EQ(bf_decision(1.0, 1.0001), Decision::Inconclusive);
    EXPECT_EQ(bf_decision(3.0, 3.0), Decision::Negative);
    EXPECT_EQ(bf_decision(0.2, 3.0), Decision::Positive);
    EXPECT_EQ(bf_decision(1.0 / 3.0, 3.0), Decision::Inconclusive);
    EXPECT_EQ(bf_decision(std::nextafter(1.0 / 3.0, 0.0), 3.0), Decision::Positive);
    EXPECT_THROW(bf_decision(1.0, 1.0), DomainError);
    EXPECT_THROW(bf_decision(0.0, 3.0), DomainError);
}

TEST(PosteriorH0, Algebra) {
    EXPECT_DOUBLE_EQ(posterior_h0(1.0), 0.5);
    EXPECT_DOUBLE_EQ(posterior_h0(3.0), 0.75);
    EXPECT_DOUBLE_EQ(posterior_h0(1.0, 3.0), 0.75);
    double prev = 0.0;
    for (double b = 0.01; b < 100.0; b *= 1.1) {
        const double p = posterior_h0(b);
        EXPECT_GT(p, prev);
        prev = p;
    }
    EXPECT_THROW(posterior_h0(-1.0), DomainError);
}

TEST(BayesFactorTest, FromSummaryStats) {
    const auto s = SummaryStats::from_moments(50, 50, 0.34, 0.0, 1.0);
    const auto r = bayes_factor_test(s);
    EXPECT_NEAR(r.b01, jzs_bf01(1.7, 50, 50), 1e-12);
    EXPECT_EQ(r.decision, Decision::Inconclusive);
    EXPECT_DOUBLE_EQ(r.posterior_h0, r.b01 / (1 + r.b01));
    EXPECT_EQ(r.threshold, 3.0);
}
