#pragma once

#include "lshawkes/kernels.hpp"
#include "lshawkes/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lshawkes {

enum class MseTarget { mean_density, bartlett };

std::string to_string(MseTarget t);
MseTarget mse_target_from_string(const std::string& s);

// How the bandwidths follow the horizon in an experiment.
struct BandwidthPolicy {
    enum class Kind { optimal, density_optimal, fixed };

    Kind kind = Kind::optimal;
    double beta = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double b1 = 0.15;  // used by Kind::fixed
    double b2 = 0.1;   // used by Kind::fixed, and by density_optimal for Bartlett targets

    // (b1, b2) at horizon T.
    std::pair<double, double> at(double horizon) const;
};

struct MseRecord {
    double horizon = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    std::size_t replicates = 0;  // successful replicates
    std::size_t failures = 0;
    double target_value = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double variance = 0.0;  // 1/R normalization, so mse = bias^2 + variance
    double mse = 0.0;
    std::vector<std::string> failure_messages;
};

struct MseReport {
    MseTarget target = MseTarget::mean_density;
    double u0 = 0.5;
    double omega0 = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<MseRecord> records;
    // Fewer than 50 replicates per horizon: fine for smoke runs, too few for
    // rate statements.
    bool underpowered = false;
};

struct MseExperiment {
    MseTarget target = MseTarget::mean_density;
    double u0 = 0.5;
    double omega0 = 0.0;
    std::vector<double> horizons;
    std::size_t replicates = 100;
    BandwidthPolicy policy;
    std::uint64_t master_seed = 1;
    // Burn-in before the simulated window; defaults to the model's.
    std::optional<double> burn_in;
};

// Simulates each replicate on the stretch of [0, T] the estimator reads,
// evaluates the estimator at (u0, omega0) and compares to the local mean
// density or local Bartlett density of the model. Replicate streams are
// derive_seed(master, bits(T), index).
MseReport mse_experiment(const LsHawkesModel& model, const MseExperiment& exp,
                         const TimeKernel& k, const FreqKernel& q);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least squares of log y on log x.
RateFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);
// Slope of log MSE against log T; InsufficientData below four horizons.
RateFit fit_rate(const MseReport& report);

struct GrowthRecord {
    double window = 0.0;
    std::size_t replicates = 0;
    double mean_count = 0.0;
    double variance = 0.0;  // unbiased sample variance of the count
    double ratio = 0.0;     // variance / window
};

struct GrowthScan {
    double u = 0.0;
    std::vector<GrowthRecord> records;
    double expected_limit = 0.0;  // 2 pi gamma(u; 0) = m1 / (1 - zeta)^2
    double limit_estimate = 0.0;  // ratio at the longest window
    double slope = 0.0;           // fitted exponent of Var against n
    // False when the fitted exponent exceeds max_slope (super-linear growth).
    bool bounded = true;
};

// Counts of the process frozen at u on [0, n] for each window n. One
// realization per replicate covers every window.
GrowthScan variance_growth_scan(const LsHawkesModel& model, double u, std::vector<double> windows,
                                std::size_t replicates, std::uint64_t seed,
                                double max_slope = 1.1);

struct FreqBiasScan {
    double u0 = 0.0;
    double omega0 = 0.0;
    double target = 0.0;
    std::vector<double> b2s;
    std::vector<double> gaps;  // |gamma_b2 - gamma|
    std::optional<RateFit> fit;  // absent when every gap vanishes
};

FreqBiasScan frequency_bias_scan(const LsHawkesModel& model, double u0, double omega0,
                                 std::vector<double> b2s, const FreqKernel& q);

nlohmann::json to_json(const MseReport& r);
nlohmann::json to_json(const RateFit& f);
nlohmann::json to_json(const GrowthScan& s);
nlohmann::json to_json(const FreqBiasScan& s);

} // namespace lshawkes
