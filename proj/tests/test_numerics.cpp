#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"

using namespace mbtree;

TEST(RisingProduct, SmallValues) {
    EXPECT_EQ(rising_product(Rational(7, 3), 1), Rational(1));
    EXPECT_EQ(rising_product(Rational(1, 2), 3), Rational(3, 4));
    EXPECT_EQ(rising_product(Rational(0), 5), Rational(24));
    EXPECT_DOUBLE_EQ(rising_product(0.5, 3), 0.75);
}

TEST(RisingProduct, RecursionProperty) {
    for (Rational x : {Rational(1, 2), Rational(-1, 3), Rational(7, 5)}) {
        Rational prev = rising_product(x, 1);
        for (int n = 1; n < 60; ++n) {
            Rational next = rising_product(x, n + 1);
            EXPECT_EQ(next, prev * (Rational(n) - x));
            prev = next;
        }
    }
    for (double x : {0.5, -0.3, 0.99}) {
        for (int n = 1; n < 150; ++n) {
            double a = rising_product(x, n + 1), b = rising_product(x, n) * (n - x);
            EXPECT_NEAR(a / b, 1.0, 1e-12) << "x=" << x << " n=" << n;
        }
    }
}

TEST(RisingProduct, LogFormMatchesGammaRatio) {
    // Gamma(n - x)/Gamma(1 - x) through lgamma
    for (double x : {0.25, 0.5, 0.9}) {
        for (int n : {1, 2, 10, 1000, 10000}) {
            int sign = 0;
            double l = log_rising_product(x, n, &sign);
            EXPECT_EQ(sign, 1);
            EXPECT_NEAR(l, std::lgamma(n - x) - std::lgamma(1 - x), 1e-9 * std::max(1.0, std::fabs(l)));
        }
    }
    int sign = 5;
    log_rising_product(1.0, 3, &sign);  // factor (1 - 1) = 0
    EXPECT_EQ(sign, 0);
}

TEST(Combinatorics, BinomialAndFactorial) {
    EXPECT_EQ(binomial<Rational>(10, 3), Rational(120));
    EXPECT_EQ(factorial<Rational>(6), Rational(720));
    EXPECT_NEAR(log_binomial(50, 25), std::log(126410606437752.0), 1e-10);
}

TEST(SpecialFunctions, BetaAndLogGamma) {
    EXPECT_NEAR(beta_fn(1, 1), 1.0, 1e-15);
    EXPECT_NEAR(beta_fn(0.5, 0.5), std::numbers::pi, 1e-13);
    EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
    EXPECT_THROW(log_gamma(0.0), std::domain_error);
    EXPECT_THROW(log_gamma(-1.5), std::domain_error);
}

TEST(Rationals, FormatAndParse) {
    EXPECT_EQ(format_rational(Rational(0)), "0/1");
    EXPECT_EQ(format_rational(Rational(6, 4)), "3/2");
    EXPECT_EQ(parse_rational("3/5"), Rational(3, 5));
    EXPECT_EQ(parse_rational("-2/4"), Rational(-1, 2));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_THROW(parse_rational("1/0"), std::domain_error);
    EXPECT_THROW(parse_rational("a/b"), std::invalid_argument);
}

TEST(Distributions, BetaPdfValues) {
    EXPECT_NEAR(beta_pdf({1, 1}, 0.3), 1.0, 1e-14);
    EXPECT_NEAR(beta_pdf({2, 1}, 0.5), 1.0, 1e-14);
    EXPECT_THROW(beta_pdf({2, 0}, 0.5), std::domain_error);
    EXPECT_THROW(BetaParams(0, 1), std::invalid_argument);
    EXPECT_EQ(beta_cdf({2, 0}, 0.999), 0.0);
    EXPECT_EQ(beta_cdf({2, 0}, 1.0), 1.0);
}

TEST(Distributions, BetaPdfIntegratesToOne) {
    for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 3.0}, {1.3, 0.2}}) {
        BetaParams p(a, b);
        double s = trapezoid_unit_interval([&](double x, double xc) { return beta_pdf(p, x, xc); }, 10000);
        EXPECT_NEAR(s, 1.0, 1e-8) << a << "," << b;
    }
}

TEST(Distributions, DirichletPdf) {
    DirichletParams d({1, 1, 1});
    std::vector<double> x{0.2, 0.3};
    EXPECT_NEAR(dirichlet_pdf(d, x), 2.0, 1e-13);
    std::vector<double> full{0.2, 0.3, 0.5};
    EXPECT_NEAR(dirichlet_pdf(d, full), 2.0, 1e-13);
    EXPECT_NEAR(d.marginal(0).mean(), 1.0 / 3.0, 1e-15);
    EXPECT_THROW(DirichletParams({1, 0}), std::invalid_argument);
}

TEST(KsTest, QuantileSample) {
    const int m = 400;
    std::vector<double> s;
    for (int i = 1; i <= m; ++i) s.push_back((i - 0.5) / m);
    auto r = ks_test(s, [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_NEAR(r.statistic, 0.5 / m, 1e-15);
    EXPECT_GT(r.p_value, 0.999);
}

TEST(KsTest, DegenerateCases) {
    std::vector<double> zeros(10, 0.0);
    EXPECT_NEAR(ks_test(zeros, [](double x) { return std::clamp(x, 0.0, 1.0); }).statistic, 1.0, 1e-15);
    std::vector<double> any{0.1, 0.4, 0.9};
    EXPECT_NEAR(ks_test(any, [](double) { return 0.0; }).statistic, 1.0, 1e-15);
    std::vector<double> empty;
    EXPECT_THROW(ks_test(empty, [](double x) { return x; }), std::invalid_argument);
}

TEST(KsTest, KolmogorovSurvivalKnownValues) {
    // Standard table values of the Kolmogorov distribution.
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-15);
}

TEST(KsTest, TwoSampleIdenticalAndDisjoint) {
    std::vector<double> a{0.1, 0.2, 0.3, 0.4}, b{0.1, 0.2, 0.3, 0.4}, c{1.1, 1.2, 1.3, 1.4};
    EXPECT_NEAR(ks_two_sample(a, b).statistic, 0.0, 1e-15);
    EXPECT_NEAR(ks_two_sample(a, c).statistic, 1.0, 1e-15);
}

TEST(ChiSquare, HomogeneousCounts) {
    std::vector<double> a{10, 20, 30}, b{20, 40, 60};
    auto r = chi_square_two_sample(a, b);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_EQ(r.dof, 2);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Moments, AccumulatorMatchesTwoPass) {
    RngStream rng(3);
    std::vector<double> v;
    MomentAccumulator acc;
    for (int i = 0; i < 1000; ++i) {
        double x = 1e8 + rng.normal();
        v.push_back(x);
        acc.add(x);
    }
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(acc.mean(), mean, 1e-6);
    EXPECT_NEAR(acc.variance(), ss / (v.size() - 1), 1e-6);
    EXPECT_NEAR(acc.stderr_mean(), std::sqrt(acc.variance() / 1000), 1e-12);
}

TEST(Quadrature, AdaptiveSimpson) {
    EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0, std::numbers::pi), 2.0, 1e-9);
    EXPECT_NEAR(trapezoid_unit_interval([](double x, double) { return std::pow(x, -0.5); }), 2.0, 1e-9);
}

// ---------------------------------------------------------------------------

TEST(Rng, Determinism) {
    RngStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
    auto d1 = RngStream::derive(7, 3), d2 = RngStream::derive(7, 3), d3 = RngStream::derive(7, 4);
    EXPECT_EQ(d1.next_u64(), d2.next_u64());
    EXPECT_NE(RngStream::derive(7, 3).next_u64(), d3.next_u64());
}

TEST(Rng, DiscreteFrequencies) {
    RngStream rng(1);
    std::vector<double> w{1, 0, 3};
    std::array<int, 3> count{};
    const int N = 200000;
    for (int i = 0; i < N; ++i) ++count[rng.discrete(w)];
    EXPECT_EQ(count[1], 0);
    double p = 0.25, se = std::sqrt(p * (1 - p) / N);
    EXPECT_NEAR(count[0] / double(N), p, 4 * se);
}

TEST(Rng, GammaAndBetaMoments) {
    RngStream rng(5);
    for (double shape : {0.3, 1.0, 4.5}) {
        MomentAccumulator acc;
        for (int i = 0; i < 100000; ++i) acc.add(rng.gamma(shape));
        EXPECT_NEAR(acc.mean(), shape, 4 * acc.stderr_mean()) << shape;
    }
    for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 3.0}, {0.1, 1.0}}) {
        MomentAccumulator acc;
        std::vector<double> s;
        for (int i = 0; i < 20000; ++i) {
            double x = rng.beta(a, b);
            acc.add(x);
            s.push_back(x);
        }
        EXPECT_NEAR(acc.mean(), a / (a + b), 4 * acc.stderr_mean());
        std::sort(s.begin(), s.end());
        BetaParams bp(a, b);
        EXPECT_GT(ks_test(s, [&](double x) { return beta_cdf(bp, x); }).p_value, 0.001);
    }
    EXPECT_EQ(rng.beta(2.0, 0.0), 1.0);
}
