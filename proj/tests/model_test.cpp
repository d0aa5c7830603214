#include "lshawkes/error.hpp"
#include "lshawkes/model.hpp"
#include "lshawkes/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lshawkes;

namespace {

LsHawkesModel make(Curve baseline, FertilityFamily f) {
    LsHawkesModel m;
    m.baseline = BaselineCurve::from_curve(std::move(baseline));
    m.fertility = std::move(f);
    return m;
}

LsHawkesModel poisson(double rate) {
    return make(Curve::constant(rate), FertilityFamily::zero());
}

LsHawkesModel exponential(double lambda, double zeta, double decay) {
    return make(Curve::constant(lambda),
                FertilityFamily::exponential(Curve::constant(zeta), Curve::constant(decay)));
}

// Trapezoid sum on a uniform grid.
template <class F>
double trapezoid(F f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) {
        s += f(a + h * static_cast<double>(i));
    }
    return s * h;
}

} // namespace

TEST(ValidateModel, PoissonPassesEverything) {
    const auto r = validate_model(poisson(1.0), 32);
    EXPECT_TRUE(r.passed);
    ASSERT_NE(r.find("subcriticality"), nullptr);
    EXPECT_EQ(r.find("subcriticality")->measured, 0.0);
    for (const auto& c : r.checks) {
        EXPECT_TRUE(c.passed) << c.name;
    }
}

TEST(ValidateModel, SupercriticalIsReportedNotThrown) {
    const auto r = validate_model(exponential(1.0, 1.2, 1.0), 32);
    EXPECT_FALSE(r.passed);
    const auto* c = r.find("subcriticality");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->passed);
    EXPECT_NEAR(c->measured, 1.2, 1e-9);
}

TEST(ValidateModel, GammaShapeWithSinusoidalBranchingRatio) {
    const auto m = make(Curve::constant(1.0),
                        FertilityFamily::gamma_shape(Curve::sinusoidal(0.3, 0.2, 1.0), Curve::constant(1.0), 3));
    const auto r = validate_model(m, 64);
    EXPECT_TRUE(r.passed);
    // oracle: numeric sup over a u-grid of int p(s; u) ds
    double sup = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double u = i / 64.0;
        sup = std::max(sup, trapezoid([&](double s) { return m.fertility.density(s, u); }, 0.0, 60.0, 60000));
    }
    EXPECT_NEAR(r.find("subcriticality")->measured, sup, 1e-6);
    EXPECT_NEAR(sup, 0.5, 1e-6);
}

TEST(ValidateModel, NegativeBaselineFails) {
    const auto m = make(Curve::sinusoidal(0.2, 0.5, 1.0), FertilityFamily::zero());
    const auto r = validate_model(m, 32);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.find("baseline-nonnegative")->passed);
}

TEST(ValidateModel, GridResolutionFloor) {
    EXPECT_THROW(validate_model(poisson(1.0), 8), DomainError);
}

TEST(LocalMeanDensity, ClosedForms) {
    EXPECT_DOUBLE_EQ(local_mean_density(exponential(1.0, 0.5, 1.0), 0.3), 2.0);
    EXPECT_DOUBLE_EQ(local_mean_density(poisson(3.0), 0.9), 3.0);
    const auto m = make(Curve::piecewise_linear({{0.0, 1.0}, {1.0, 1.5}}),
                        FertilityFamily::exponential(Curve::piecewise_linear({{0.0, 0.3}, {1.0, 0.5}}),
                                                     Curve::constant(2.0)));
    EXPECT_NEAR(local_mean_density(m, 0.5), 1.25 / 0.6, 1e-14);
    EXPECT_THROW(local_mean_density(exponential(1.0, 1.0, 1.0), 0.5), InvalidModel);
}

TEST(FertilityFt, ExponentialClosedForm) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const auto a = fertility_ft(m, 0.5, 0.0);
    EXPECT_NEAR(a.real(), 0.5, 1e-15);
    EXPECT_NEAR(a.imag(), 0.0, 1e-15);
    const auto b = fertility_ft(m, 0.5, 1.0);
    EXPECT_NEAR(b.real(), 0.25, 1e-15);
    EXPECT_NEAR(b.imag(), -0.25, 1e-15);
}

TEST(FertilityFt, GammaShapeMatchesDenseQuadrature) {
    const auto m = make(Curve::constant(1.0),
                        FertilityFamily::gamma_shape(Curve::sinusoidal(0.3, 0.2, 1.0), Curve::constant(1.5), 3));
    const double u = 0.3;
    const double w = 2.0;
    const auto v = fertility_ft(m, u, w);
    const double re = trapezoid([&](double s) { return m.fertility.density(s, u) * std::cos(w * s); }, 0.0, 60.0, 600000);
    const double im = trapezoid([&](double s) { return -m.fertility.density(s, u) * std::sin(w * s); }, 0.0, 60.0, 600000);
    EXPECT_NEAR(v.real(), re, 1e-8);
    EXPECT_NEAR(v.imag(), im, 1e-8);
}

TEST(FertilityFt, SampledTableAgainstQuadratureAndNyquistGuard) {
    const auto f = FertilityFamily::sampled_table(Curve::constant(0.4), 0.05, {0.0, 1.0, 0.8, 0.5, 0.3, 0.1, 0.0});
    const auto m = make(Curve::constant(1.0), f);
    EXPECT_NEAR(fertility_ft(m, 0.5, 0.0).real(), 0.4, 1e-12);
    const double w = 3.0;
    const auto v = fertility_ft(m, 0.5, w);
    const double re = trapezoid([&](double s) { return f.density(s, 0.5) * std::cos(w * s); }, 0.0, 0.3, 300000);
    EXPECT_NEAR(v.real(), re, 1e-4);
    EXPECT_THROW(fertility_ft(m, 0.5, 500.0), QuadratureFailure);
}

TEST(FertilityFt, BoundedByBranchingRatio) {
    const auto m = make(Curve::constant(1.0),
                        FertilityFamily::gamma_shape(Curve::sinusoidal(0.3, 0.2, 1.0), Curve::constant(0.7), 2));
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform();
        const double w = 40.0 * rng.uniform() - 20.0;
        const double z = m.fertility.zeta(u);
        EXPECT_LE(std::abs(fertility_ft(m, u, w)), z * (1.0 + 1e-12));
        EXPECT_NEAR(fertility_ft(m, u, 0.0).real(), z, 1e-10);
    }
}

TEST(LocalBartlett, ClosedForms) {
    EXPECT_NEAR(local_bartlett(poisson(1.0), 0.5, 3.0), 1.0 / kTwoPi, 1e-15);
    EXPECT_NEAR(local_bartlett(poisson(1.0), 0.5, 3.0), 0.159155, 1e-6);
    const auto m = exponential(1.0, 0.5, 1.0);
    EXPECT_NEAR(local_bartlett(m, 0.5, 0.0), 4.0 / kPi, 1e-14);
    EXPECT_NEAR(local_bartlett(m, 0.5, 1e7), 1.0 / kPi, 1e-7);
}

TEST(LocalBartlett, MonotoneBoundProperty) {
    const auto m = make(Curve::sinusoidal(1.0, 0.5, 1.0),
                        FertilityFamily::gamma_shape(Curve::sinusoidal(0.4, 0.3, 2.0), Curve::constant(1.0), 2));
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        const double u = rng.uniform();
        const double w = 30.0 * rng.uniform() - 15.0;
        const double m1 = local_mean_density(m, u);
        const double z = m.fertility.zeta(u);
        const double g = local_bartlett(m, u, w);
        EXPECT_GE(g, m1 / kTwoPi / ((1 + z) * (1 + z)) * (1 - 1e-12));
        EXPECT_LE(g, m1 / kTwoPi / ((1 - z) * (1 - z)) * (1 + 1e-12));
    }
}

TEST(RegularizedBartlett, PoissonIsExact) {
    const auto q = epanechnikov_kernel();
    for (double b2 : {0.01, 0.3, 1.0}) {
        EXPECT_DOUBLE_EQ(regularized_bartlett(poisson(2.0), 0.5, 1.0, b2, q), 2.0 / kTwoPi);
    }
}

TEST(RegularizedBartlett, MatchesDenseTrapezoidOracle) {
    const auto q = epanechnikov_kernel();
    const auto m = exponential(1.0, 0.5, 1.0);
    const double b2 = 0.1;
    // int b2^{-1} |Q((w - w0)/b2)|^2 gamma(w) dw, written in x = (w - w0)/b2
    const double oracle = trapezoid(
        [&](double x) { return std::norm(q.transform(x)) * local_bartlett(m, 0.5, b2 * x); }, -1000.0, 1000.0,
        100000);
    EXPECT_NEAR(regularized_bartlett(m, 0.5, 0.0, b2, q), oracle, 1e-6);
}

TEST(RegularizedBartlett, QuadraticConvergence) {
    const auto q = epanechnikov_kernel();
    const auto m = exponential(1.0, 0.5, 1.0);
    const double g = local_bartlett(m, 0.5, 1.0);
    const double gap1 = std::abs(regularized_bartlett(m, 0.5, 1.0, 0.1, q) - g);
    const double gap2 = std::abs(regularized_bartlett(m, 0.5, 1.0, 0.05, q) - g);
    const double gap3 = std::abs(regularized_bartlett(m, 0.5, 1.0, 0.025, q) - g);
    EXPECT_GE(gap1 / gap2, 3.0);
    EXPECT_GE(gap2 / gap3, 3.0);
    EXPECT_THROW(regularized_bartlett(m, 0.5, 1.0, 0.0, q), DomainError);
}

TEST(IdentifyBaseline, Examples) {
    EXPECT_NEAR(identify_baseline(2.0, 4.0 / kPi), 1.0, 1e-15);
    EXPECT_NEAR(identify_baseline(3.0, 3.0 / kTwoPi), 3.0, 1e-14);
    EXPECT_EQ(identify_baseline(0.0, 1.0), 0.0);
    EXPECT_THROW(identify_baseline(1.0, 0.0), DomainError);
    EXPECT_THROW(identify_baseline(1.0, -2.0), DomainError);
}

TEST(IdentifyBaseline, RoundtripProperty) {
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto zeta = Curve::sinusoidal(0.1 + 0.3 * rng.uniform(), 0.05, 1.0);
        const auto m = make(Curve::sinusoidal(1.0 + rng.uniform(), 0.5, 1.0),
                            i % 2 ? FertilityFamily::exponential(zeta, Curve::constant(0.5 + rng.uniform()))
                                  : FertilityFamily::gamma_shape(zeta, Curve::constant(1.0), 1 + i % 4));
        const double u = rng.uniform();
        const double lc = identify_baseline(local_mean_density(m, u), local_bartlett(m, u, 0.0));
        EXPECT_NEAR(lc / m.baseline(u), 1.0, 1e-10);
    }
}

TEST(FrozenModel, HoldsCurvesAtU) {
    const auto m = make(Curve::sinusoidal(1.0, 0.5, 1.0),
                        FertilityFamily::exponential(Curve::sinusoidal(0.3, 0.1, 1.0), Curve::constant(2.0)));
    const auto f = m.frozen_at(0.25);
    for (double u : {0.0, 0.6, 1.0}) {
        EXPECT_NEAR(f.baseline(u), 1.5, 1e-14);
        EXPECT_NEAR(f.fertility.zeta(u), 0.4, 1e-14);
    }
}
