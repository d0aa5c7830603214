#include "lshawkes/error.hpp"
#include "lshawkes/model.hpp"
#include "lshawkes/numeric.hpp"
#include "lshawkes/validate.hpp"

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

LsHawkesModel poisson(double rate) { return make(Curve::constant(rate), FertilityFamily::zero()); }

LsHawkesModel exponential(double lambda, double zeta, double decay) {
    return make(Curve::constant(lambda),
                FertilityFamily::exponential(Curve::constant(zeta), Curve::constant(decay)));
}

MseExperiment small_density_experiment() {
    MseExperiment e;
    e.target = MseTarget::mean_density;
    e.u0 = 0.5;
    e.horizons = {200.0, 400.0, 800.0, 1600.0};
    e.replicates = 20;
    e.policy.kind = BandwidthPolicy::Kind::fixed;
    e.policy.b1 = 0.2;
    e.master_seed = 99;
    return e;
}

} // namespace

TEST(FitPowerLaw, ExactPowerLaw) {
    const std::vector<double> xs = {10.0, 100.0, 1000.0, 10000.0};
    std::vector<double> ys;
    for (double x : xs) {
        ys.push_back(3.0 * std::pow(x, -0.75));
    }
    const auto f = fit_power_law(xs, ys);
    EXPECT_NEAR(f.slope, -0.75, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_THROW(fit_power_law({1.0}, {1.0}), InsufficientData);
    EXPECT_THROW(fit_power_law({1.0, 2.0}, {1.0, 0.0}), DomainError);
}

TEST(FitRate, NeedsFourHorizons) {
    MseReport r;
    for (double T : {1.0, 2.0, 4.0}) {
        MseRecord rec;
        rec.horizon = T;
        rec.replicates = 1;
        rec.mse = 1.0 / T;
        r.records.push_back(rec);
    }
    EXPECT_THROW(fit_rate(r), InsufficientData);
    r.records.push_back(r.records.back());
    r.records.back().horizon = 8.0;
    r.records.back().mse = 1.0 / 8.0;
    EXPECT_NEAR(fit_rate(r).slope, -1.0, 1e-12);
    r.records.back().replicates = 0;
    EXPECT_THROW(fit_rate(r), InsufficientData);
}

TEST(BandwidthPolicy, Kinds) {
    BandwidthPolicy p;
    p.kind = BandwidthPolicy::Kind::fixed;
    EXPECT_EQ(p.at(1e4), std::make_pair(0.15, 0.1));
    p.kind = BandwidthPolicy::Kind::density_optimal;
    EXPECT_NEAR(p.at(1e6).first, 0.01, 1e-15);
    EXPECT_EQ(p.at(1e6).second, 0.1);
    p.kind = BandwidthPolicy::Kind::optimal;
    EXPECT_NEAR(p.at(1e4).first, 0.07197, 1e-5);
    EXPECT_NEAR(p.at(1e4).second, 0.26827, 1e-5);
}

TEST(MseTargetNames, RoundTrip) {
    for (auto t : {MseTarget::mean_density, MseTarget::bartlett}) {
        EXPECT_EQ(mse_target_from_string(to_string(t)), t);
    }
    EXPECT_THROW(mse_target_from_string("variance"), ParseError);
}

TEST(MseExperiment, IdentityAndDeterminism) {
    const auto m = poisson(2.0);
    const auto e = small_density_experiment();
    const auto k = triangle_kernel();
    const auto q = epanechnikov_kernel();
    const auto a = mse_experiment(m, e, k, q);
    const auto b = mse_experiment(m, e, k, q);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_TRUE(a.underpowered);
    ASSERT_EQ(a.records.size(), 4u);
    for (const auto& r : a.records) {
        EXPECT_EQ(r.replicates, 20u);
        EXPECT_EQ(r.failures, 0u);
        EXPECT_DOUBLE_EQ(r.target_value, 2.0);
        EXPECT_NEAR(r.mse, r.bias * r.bias + r.variance, 1e-15);
        // Poisson: Var m-hat = lambda int k^2 / (T b1) = 2 * (4/3) / (T b1)
        EXPECT_NEAR(r.variance / (8.0 / 3.0 / (r.horizon * 0.2)), 1.0, 0.7);
    }
    auto other = e;
    other.master_seed = 100;
    EXPECT_NE(to_json(mse_experiment(m, other, k, q)).dump(), to_json(a).dump());
}

TEST(MseExperiment, SingleReplicateHasZeroVariance) {
    auto e = small_density_experiment();
    e.replicates = 1;
    const auto r = mse_experiment(poisson(1.0), e, triangle_kernel(), epanechnikov_kernel());
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.variance, 0.0);
        EXPECT_DOUBLE_EQ(rec.mse, rec.bias * rec.bias);
    }
}

TEST(MseExperiment, FailuresAreRecorded) {
    auto e = small_density_experiment();
    e.u0 = 0.02;
    e.replicates = 3;
    const auto r = mse_experiment(poisson(1.0), e, triangle_kernel(), epanechnikov_kernel());
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.replicates, 0u);
        EXPECT_EQ(rec.failures, 3u);
        ASSERT_EQ(rec.failure_messages.size(), 3u);
        EXPECT_NE(rec.failure_messages[0].find("infeasible"), std::string::npos);
    }
    EXPECT_THROW(fit_rate(r), InsufficientData);
}

TEST(MseExperiment, BartlettTargetOnPoisson) {
    MseExperiment e;
    e.target = MseTarget::bartlett;
    e.omega0 = 1.0;
    e.horizons = {2000.0};
    e.replicates = 30;
    e.policy.kind = BandwidthPolicy::Kind::fixed;
    e.policy.b1 = 0.3;
    e.policy.b2 = 0.1;
    const auto r = mse_experiment(poisson(1.0), e, triangle_kernel(), epanechnikov_kernel());
    const auto& rec = r.records.front();
    EXPECT_DOUBLE_EQ(rec.target_value, 1.0 / kTwoPi);
    EXPECT_NEAR(rec.mean_estimate, 1.0 / kTwoPi, 4.0 * std::sqrt(rec.variance / 30.0) + 0.01);
    EXPECT_EQ(rec.b2, 0.1);
}

TEST(VarianceGrowth, PoissonRatioIsRate) {
    const auto s = variance_growth_scan(poisson(3.0), 0.5, {50.0, 100.0, 200.0}, 200, 7);
    EXPECT_NEAR(s.expected_limit, 3.0, 1e-14);
    EXPECT_NEAR(s.limit_estimate, 3.0, 0.75);
    EXPECT_TRUE(s.bounded);
    EXPECT_NEAR(s.slope, 1.0, 0.3);
    for (const auto& r : s.records) {
        EXPECT_NEAR(r.mean_count, 3.0 * r.window, 4.0 * std::sqrt(3.0 * r.window / 200.0));
    }
}

TEST(VarianceGrowth, ExpectedLimitForHawkes) {
    const auto s = variance_growth_scan(exponential(1.0, 0.5, 1.0), 0.5, {20.0, 40.0}, 4, 8);
    EXPECT_NEAR(s.expected_limit, 8.0, 1e-12);
    EXPECT_THROW(variance_growth_scan(poisson(1.0), 0.5, {10.0}, 1, 1), DomainError);
}

TEST(FrequencyBias, PoissonHasNoGap) {
    const auto s = frequency_bias_scan(poisson(1.0), 0.5, 1.0, {0.4, 0.2, 0.1}, epanechnikov_kernel());
    for (double g : s.gaps) {
        EXPECT_LE(g, 1e-12);
    }
    EXPECT_FALSE(s.fit.has_value());
}

TEST(FrequencyBias, SmallBandwidthsConvergeQuadratically) {
    const auto s = frequency_bias_scan(exponential(1.0, 0.5, 1.0), 0.5, 1.0, {0.1, 0.05, 0.025, 0.0125},
                                       epanechnikov_kernel());
    ASSERT_TRUE(s.fit.has_value());
    EXPECT_NEAR(s.fit->slope, 2.0, 0.2);
    EXPECT_NEAR(s.target, local_bartlett(exponential(1.0, 0.5, 1.0), 0.5, 1.0), 1e-15);
}

TEST(FrequencyBias, HalvingFromPointTwoToPointOne) {
    const auto s = frequency_bias_scan(exponential(1.0, 0.5, 1.0), 0.5, 1.0, {0.2, 0.1}, epanechnikov_kernel());
    const double ratio = s.gaps[0] / s.gaps[1];
    EXPECT_GE(ratio, 3.0);
    EXPECT_LE(ratio, 5.0);
}

TEST(ReportJson, Fields) {
    const auto r = mse_experiment(poisson(1.0), small_density_experiment(), triangle_kernel(),
                                  epanechnikov_kernel());
    const auto j = to_json(r);
    EXPECT_EQ(j.at("target"), "mean-density");
    EXPECT_EQ(j.at("records").size(), 4u);
    EXPECT_TRUE(j.at("underpowered").get<bool>());
}
