#include <gtest/gtest.h>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cet/distributions.hpp"
#include "oracles.hpp"

using namespace cet;

TEST(NormalCdf, CentreIsOneHalf) { EXPECT_DOUBLE_EQ(normal_cdf(0.0, 0.0, 1.0), 0.5); }

TEST(NormalCdf, MatchesSeriesOracle) {
    // Series oracle: Phi(1.959964) = 0.975000000903557...
    EXPECT_NEAR(normal_cdf(1.959964, 0.0, 1.0), test::normal_cdf_series(1.959964), 1e-14);
    EXPECT_NEAR(normal_cdf(1.959964, 0.0, 1.0), 0.975, 1e-8);
    for (double z = -4.0; z <= 4.0; z += 0.125)
        EXPECT_NEAR(normal_cdf(z), test::normal_cdf_series(z), 1e-13) << z;
}

TEST(NormalCdf, SymmetryIdentity) {
    EXPECT_NEAR(normal_cdf(-0.7) + normal_cdf(0.7), 1.0, 1e-15);
    EXPECT_NEAR(normal_cdf(3.0, 1.0, 2.0), normal_cdf(1.0), 1e-15);
}

TEST(NormalCdf, RejectsNonpositiveSd) {
    EXPECT_THROW(normal_cdf(0.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(normal_cdf(0.0, 0.0, -1.0), DomainError);
}

TEST(NormalQuantile, InvertsCdf) {
    for (double p : {1e-10, 1e-4, 0.01, 0.1, 0.5, 0.9, 0.975, 0.999999})
        EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-12 * p) << p;
    EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(Df, RejectsNonpositive) {
    EXPECT_THROW(Df(0.0), DomainError);
    EXPECT_THROW(Df(-3.0), DomainError);
    EXPECT_THROW(Df(std::nan("")), DomainError);
    EXPECT_NO_THROW(Df(2.5));
}

TEST(TCdf, CentreAndCauchy) {
    EXPECT_DOUBLE_EQ(t_cdf(0.0, Df(10)), 0.5);
    // df = 1 is Cauchy: 1/2 + atan(x)/pi
    for (double x : {-20.0, -1.0, 0.3, 1.0, 7.0})
        EXPECT_NEAR(t_cdf(x, Df(1)), 0.5 + std::atan(x) / std::numbers::pi, 1e-14) << x;
    EXPECT_NEAR(t_cdf(1.0, Df(1)), 0.75, 1e-15);
}

TEST(TCdf, IncompleteBetaOracleAtDf88) {
    // 1 - I_{88/92}(44, 1/2) / 2, evaluated at 40 digits.
    EXPECT_NEAR(t_cdf(2.0, Df(88)), 0.97570808852186427, 1e-14);
    EXPECT_NEAR(t_cdf(2.0, Df(88)), test::t_cdf_simpson(2.0, 88), 1e-12);
}

TEST(TCdf, AgreesWithBoostAndSimpson) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-8.0, 8.0);
    std::uniform_real_distribution<double> ulogdf(0.0, std::log(5000.0));
    for (int i = 0; i < 300; ++i) {
        const double x = ux(rng);
        const double df = std::exp(ulogdf(rng));
        const double expected = boost::math::cdf(boost::math::students_t(df), x);
        EXPECT_NEAR(t_cdf(x, Df(df)), expected, 1e-13) << "x=" << x << " df=" << df;
    }
    EXPECT_NEAR(t_cdf(-3.1, Df(4.5)), test::t_cdf_simpson(-3.1, 4.5), 1e-11);
}

TEST(TCdf, SymmetryAndRange) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-50.0, 50.0);
    std::uniform_real_distribution<double> udf(0.2, 400.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = ux(rng);
        const Df df(udf(rng));
        const double f = t_cdf(x, df);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        EXPECT_NEAR(t_cdf(-x, df), 1.0 - f, 1e-14);
    }
}

TEST(TCdf, MonotoneInX) {
    for (double df : {1.0, 3.0, 30.0, 998.0}) {
        double prev = 0.0;
        for (double x = -30.0; x <= 30.0; x += 0.01) {
            const double f = t_cdf(x, Df(df));
            ASSERT_GE(f, prev) << "x=" << x << " df=" << df;
            prev = f;
        }
    }
}

TEST(TQuantile, KnownValues) {
    EXPECT_EQ(t_quantile(0.5, Df(7)), 0.0);
    EXPECT_NEAR(t_quantile(0.975, Df(1)), 12.706204736174705, 1e-11);
    EXPECT_NEAR(t_quantile(0.975, Df(1)), std::tan(std::numbers::pi * 0.475), 1e-11);
    EXPECT_NEAR(t_quantile(0.95, Df(88)), 1.6623540291668962, 1e-12);
    EXPECT_NEAR(t_quantile(0.975, Df(998)), 1.9623438462163346, 1e-12);
}

TEST(TQuantile, MatchesBisectionOracle) {
    for (double df : {2.0, 5.5, 88.0, 998.0}) {
        for (double p : {0.01, 0.2, 0.9, 0.95, 0.975}) {
            const double oracle = test::bisect_quantile([&](double t) { return t_cdf(t, Df(df)); }, p, -100, 100);
            EXPECT_NEAR(t_quantile(p, Df(df)), oracle, 1e-9) << "p=" << p << " df=" << df;
        }
    }
}

TEST(TQuantile, RoundTripsCdfOnGrid) {
    // Inverse of the cdf within 1e-8 over df in 1..1000, p in (0.001, 0.999).
    for (int df = 1; df <= 1000; df += (df < 20 ? 1 : 37)) {
        for (double p = 0.001; p < 0.999; p += 0.0413) {
            const double q = t_quantile(p, Df(df));
            ASSERT_NEAR(t_cdf(q, Df(df)), p, 1e-10) << "df=" << df << " p=" << p;
        }
    }
}

TEST(TQuantile, RejectsOutOfRange) {
    EXPECT_THROW(t_quantile(0.0, Df(5)), DomainError);
    EXPECT_THROW(t_quantile(1.0, Df(5)), DomainError);
    EXPECT_THROW(t_quantile(-0.2, Df(5)), DomainError);
    EXPECT_THROW(t_quantile(std::nan(""), Df(5)), DomainError);
}

TEST(NoncentralTCdf, CentralReduction) {
    EXPECT_NEAR(noncentral_t_cdf(1.3, Df(20), Ncp(0.0)), t_cdf(1.3, Df(20)), 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-6.0, 6.0), udf(1.0, 300.0);
    for (int i = 0; i < 100; ++i) {
        const double x = ux(rng);
        const Df df(udf(rng));
        EXPECT_NEAR(noncentral_t_cdf(x, df, Ncp(0.0)), t_cdf(x, df), 1e-9);
        // the series path itself, not just the shortcut
        EXPECT_NEAR(detail::noncentral_t_series(x, df.value(), 0.0), t_cdf(x, df), 1e-9);
    }
}

TEST(NoncentralTCdf, ZeroArgumentIsNormalTail) {
    // Pr(T <= 0) = Pr(Z + ncp <= 0) = Phi(-ncp)
    EXPECT_NEAR(noncentral_t_cdf(0.0, Df(30), Ncp(1.5)), 0.066807201268858066, 1e-13);
}

TEST(NoncentralTCdf, HighPrecisionOracleValues) {
    // Mixture integral evaluated at 40 digits.
    EXPECT_NEAR(noncentral_t_cdf(1.3, Df(20), Ncp(0.7)), 0.71630628101447417, 1e-11);
    EXPECT_NEAR(noncentral_t_cdf(2.5, Df(10), Ncp(3.0)), 0.31025723641690514, 1e-11);
    EXPECT_NEAR(noncentral_t_cdf(-1.0, Df(5), Ncp(-2.0)), 0.84186435644308189, 1e-11);
}

TEST(NoncentralTCdf, AgreesWithBoost) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-10.0, 10.0), ulogdf(0.0, std::log(6000.0)), uncp(-30.0, 30.0);
    for (int i = 0; i < 300; ++i) {
        const double x = ux(rng);
        const double df = std::exp(ulogdf(rng));
        const double ncp = uncp(rng);
        const double expected = boost::math::cdf(boost::math::non_central_t(df, ncp), x);
        EXPECT_NEAR(noncentral_t_cdf(x, Df(df), Ncp(ncp)), expected, 1e-8)
            << "x=" << x << " df=" << df << " ncp=" << ncp;
    }
}

TEST(NoncentralTCdf, SeriesAndMixtureAgree) {
    for (double df : {3.0, 28.0, 158.0, 998.0})
        for (double ncp : {-8.0, -1.0, 0.5, 3.2411, 12.0})
            for (double x : {-4.0, -1.96, 0.4, 1.96, 6.0})
                EXPECT_NEAR(detail::noncentral_t_series(x, df, ncp), detail::noncentral_t_mixture(x, df, ncp), 1e-9)
                    << x << " " << df << " " << ncp;
}

TEST(NoncentralTCdf, LargeNoncentralityUsesMixture) {
    const double v = noncentral_t_cdf(2.0, Df(100), Ncp(45.0));
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1e-12);
    EXPECT_NEAR(noncentral_t_cdf(60.0, Df(100), Ncp(45.0)),
                boost::math::cdf(boost::math::non_central_t(100.0, 45.0), 60.0), 1e-8);
}

TEST(NoncentralTCdf, PowerAnchorNear998) {
    // At n = 1000 and mu_d / sigma* = 3.2411 the upper critical value has cdf ~0.10 (power 0.90).
    const Df df(998);
    const double t1 = t_quantile(0.975, df);
    EXPECT_NEAR(noncentral_t_cdf(t1, df, Ncp(3.2411)), 0.10, 1e-3);
}

TEST(NoncentralTCdf, MatchesSampledVariates) {
    // Empirical cdf of 1e6 draws (Z + ncp) / sqrt(chi2 / df) within 3 MC standard errors.
    std::mt19937_64 rng(2024);
    const double df = 30.0, ncp = 1.5;
    std::normal_distribution<double> z;
    std::chi_squared_distribution<double> chi2(df);
    const int m = 1'000'000;
    std::vector<double> draws(m);
    for (auto& t : draws) t = (z(rng) + ncp) / std::sqrt(chi2(rng) / df);
    std::sort(draws.begin(), draws.end());
    for (double x : {-1.0, 0.0, 1.0, 1.5, 2.5, 4.0}) {
        const double empirical =
            static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) / m;
        const double exact = noncentral_t_cdf(x, Df(df), Ncp(ncp));
        const double se = std::sqrt(exact * (1 - exact) / m);
        EXPECT_NEAR(empirical, exact, 3 * se + 1e-12) << x;
    }
}

TEST(NoncentralTCdf, RangeAndMonotone) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> udf(1.0, 2000.0), uncp(-20.0, 20.0);
    for (int i = 0; i < 60; ++i) {
        const Df df(udf(rng));
        const Ncp ncp(uncp(rng));
        double prev = 0.0;
        for (double x = -40.0; x <= 40.0; x += 0.25) {
            const double f = noncentral_t_cdf(x, df, ncp);
            ASSERT_GE(f, prev - 1e-13) << x << " " << df.value() << " " << ncp.value();
            ASSERT_LE(f, 1.0);
            prev = f;
        }
    }
}

TEST(Ncp, RejectsNonFinite) {
    EXPECT_THROW(Ncp(std::numeric_limits<double>::infinity()), DomainError);
    EXPECT_THROW(Ncp(std::nan("")), DomainError);
}

TEST(Chi2Sample, MomentsMatch) {
    Rng rng(123);
    const int m = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double v = chi2_sample(Df(88), rng);
        ASSERT_GT(v, 0.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / m;
    const double var = sum2 / m - mean * mean;
    EXPECT_NEAR(mean, 88.0, 0.5);
    EXPECT_NEAR(var, 176.0, 3.0);
}

TEST(Chi2Sample, SameSeedSameStream) {
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(chi2_sample(Df(7.5), a), chi2_sample(Df(7.5), b));
}
