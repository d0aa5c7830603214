#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"
#include "lshawkes/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lshawkes;

namespace {

LsHawkesModel make(Curve baseline, FertilityFamily f) {
    LsHawkesModel m;
    m.baseline = BaselineCurve::from_curve(std::move(baseline));
    m.fertility = std::move(f);
    return m;
}

LsHawkesModel exponential(double lambda, double zeta, double decay) {
    return make(Curve::constant(lambda),
                FertilityFamily::exponential(Curve::constant(zeta), Curve::constant(decay)));
}

SimulationConfig seeded(std::uint64_t seed) {
    SimulationConfig c;
    c.seed = seed;
    return c;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <class F>
Moments count_moments(F simulate, int reps) {
    double s = 0.0;
    double s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double n = static_cast<double>(simulate(r).size());
        s += n;
        s2 += n * n;
    }
    Moments m;
    m.mean = s / reps;
    m.var = (s2 - reps * m.mean * m.mean) / (reps - 1);
    return m;
}

} // namespace

TEST(EventSeries, RejectsBadInput) {
    EXPECT_THROW(EventSeries({1.0, 0.5}, 10.0), DomainError);
    EXPECT_THROW(EventSeries({1.0, 1.0}, 10.0), DomainError);
    EXPECT_THROW(EventSeries({11.0}, 10.0), DomainError);
    EXPECT_THROW(EventSeries({}, 0.5), DomainError);
    EXPECT_NO_THROW(EventSeries({0.0, 10.0}, 10.0));
}

TEST(ConditionalIntensity, SingleEventExample) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const std::vector<double> h = {1.0};
    EXPECT_NEAR(conditional_intensity(m, 100.0, h, 2.0), 1.0 + 0.5 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(conditional_intensity(m, 100.0, h, 2.0), 1.18394, 1e-5);
    EXPECT_THROW(conditional_intensity(m, 100.0, h, 1.0), DomainError);
}

TEST(ConditionalIntensity, UsesRescaledTimeForCurves) {
    const auto m = make(Curve::sinusoidal(1.0, 0.5, 1.0),
                        FertilityFamily::exponential(Curve::sinusoidal(0.3, 0.2, 1.0), Curve::constant(2.0)));
    const std::vector<double> h = {20.0, 24.0};
    const double T = 100.0;
    const double t = 25.0;
    const double u = 0.25;
    const double expect = (1.0 + 0.5) + 0.5 * 2.0 * (std::exp(-10.0) + std::exp(-2.0));
    EXPECT_NEAR(m.baseline(u), 1.5, 1e-14);
    EXPECT_NEAR(conditional_intensity(m, T, h, t), expect, 1e-12);
}

TEST(Simulate, ZeroBaselineGivesEmptySeries) {
    const auto m = exponential(0.0, 0.5, 1.0);
    const auto s = simulate_ls_hawkes(m, 100.0, seeded(1));
    EXPECT_TRUE(s.empty());
    EXPECT_EQ(s.horizon(), 100.0);
}

TEST(Simulate, RejectsSupercriticalModel) {
    EXPECT_THROW(simulate_ls_hawkes(exponential(1.0, 1.0, 1.0), 100.0, seeded(1)), InvalidModel);
    EXPECT_THROW(simulate_ls_hawkes(exponential(1.0, 0.5, 1.0), 0.5, seeded(1)), DomainError);
}

TEST(Simulate, DeterministicPerSeed) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const auto a = simulate_ls_hawkes(m, 500.0, seeded(42));
    const auto b = simulate_ls_hawkes(m, 500.0, seeded(42));
    const auto c = simulate_ls_hawkes(m, 500.0, seeded(43));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.seed, std::optional<std::uint64_t>(42));
}

TEST(Simulate, WindowKeepsOnlyTheWindow) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const auto s = simulate_ls_hawkes_window(m, 1000.0, 400.0, 600.0, seeded(5));
    ASSERT_FALSE(s.empty());
    EXPECT_GE(s.times().front(), 400.0);
    EXPECT_LE(s.times().back(), 600.0);
    EXPECT_EQ(s.horizon(), 1000.0);
    EXPECT_THROW(simulate_ls_hawkes_window(m, 1000.0, 600.0, 400.0, seeded(5)), DomainError);
}

TEST(Simulate, PoissonCountMatchesRate) {
    const auto m = make(Curve::constant(2.0), FertilityFamily::zero());
    const int reps = 200;
    const double T = 500.0;
    const auto mo = count_moments([&](int r) { return simulate_ls_hawkes(m, T, seeded(derive_seed(11, r))); }, reps);
    const double se = std::sqrt(2.0 * T / reps);
    EXPECT_NEAR(mo.mean, 2.0 * T, 3.5 * se);
    EXPECT_NEAR(mo.var / (2.0 * T), 1.0, 0.3);
}

TEST(Simulate, StationaryHawkesCountMatchesMeanDensity) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const int reps = 40;
    const double T = 2000.0;
    const auto mo = count_moments([&](int r) { return simulate_ls_hawkes(m, T, seeded(derive_seed(12, r))); }, reps);
    // Var N(T) ~ T m1 / (1 - zeta)^2
    const double se = std::sqrt(T * 2.0 / 0.25 / reps);
    EXPECT_NEAR(mo.mean, 2.0 * T, 3.5 * se);
}

TEST(Simulate, GenericRouteAgreesWithExponentialInDistribution) {
    // Gamma shape 1 is the exponential density through the generic history.
    const auto g = make(Curve::constant(1.0),
                        FertilityFamily::gamma_shape(Curve::constant(0.5), Curve::constant(1.0), 1));
    const int reps = 40;
    const double T = 1000.0;
    const auto mo = count_moments([&](int r) { return simulate_ls_hawkes(g, T, seeded(derive_seed(13, r))); }, reps);
    const double se = std::sqrt(T * 2.0 / 0.25 / reps);
    EXPECT_NEAR(mo.mean, 2.0 * T, 3.5 * se);
}

TEST(Simulate, LocallyStationaryCountFollowsIntegratedMeanDensity) {
    const auto m = make(Curve::sinusoidal(1.0, 0.5, 1.0),
                        FertilityFamily::exponential(Curve::constant(0.3), Curve::constant(4.0)));
    const int reps = 40;
    const double T = 2000.0;
    // int_0^T m1(t/T) dt = T / 0.7 since the sine integrates to zero
    const auto mo = count_moments([&](int r) { return simulate_ls_hawkes(m, T, seeded(derive_seed(14, r))); }, reps);
    const double se = std::sqrt(T * 1.5 / 0.7 / 0.49 / reps);
    EXPECT_NEAR(mo.mean, T / 0.7, 4.0 * se);
}

TEST(SimulateFrozen, UsesCurvesAtU) {
    const auto m = make(Curve::sinusoidal(1.0, 0.5, 1.0),
                        FertilityFamily::exponential(Curve::constant(0.2), Curve::constant(3.0)));
    const int reps = 60;
    const double n = 1000.0;
    const auto mo = count_moments([&](int r) { return simulate_frozen(m, 0.25, n, seeded(derive_seed(15, r))); }, reps);
    const double m1 = 1.5 / 0.8;
    const double se = std::sqrt(n * m1 / 0.64 / reps);
    EXPECT_NEAR(mo.mean, m1 * n, 3.5 * se);
}

TEST(DefaultBurnIn, Formula) {
    EXPECT_NEAR(default_burn_in(exponential(1.0, 0.5, 2.0)), 5.0 / (2.0 * 0.5), 1e-12);
}

TEST(EventIo, RoundTrip) {
    const auto m = exponential(1.0, 0.5, 1.0);
    const auto s = simulate_ls_hawkes(m, 200.0, seeded(77));
    const auto path = std::filesystem::temp_directory_path() / "lshawkes_events_roundtrip.txt";
    write_events(path.string(), s);
    const auto back = read_events(path.string());
    EXPECT_EQ(back, s);
    EXPECT_EQ(back.seed, s.seed);
    std::filesystem::remove(path);
}

TEST(EventIo, ParseErrors) {
    const auto path = std::filesystem::temp_directory_path() / "lshawkes_events_bad.txt";
    {
        std::ofstream out(path);
        out << "1.0\n2.0x\n";
    }
    EXPECT_THROW(read_events(path.string(), 10.0), ParseError);
    {
        std::ofstream out(path);
        out << "1.0\n";
    }
    EXPECT_THROW(read_events(path.string()), ParseError);
    EXPECT_EQ(read_events(path.string(), 10.0).size(), 1u);
    std::filesystem::remove(path);
    EXPECT_THROW(read_events("/nonexistent/events.txt", 10.0), IoError);
}
