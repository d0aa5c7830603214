#include "lshawkes/validate.hpp"

#include "lshawkes/bandwidth.hpp"
#include "lshawkes/error.hpp"
#include "lshawkes/estimate.hpp"
#include "lshawkes/numeric.hpp"
#include "lshawkes/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace lshawkes {

std::string to_string(MseTarget t) {
    return t == MseTarget::mean_density ? "mean-density" : "bartlett";
}

MseTarget mse_target_from_string(const std::string& s) {
    if (s == "mean-density") {
        return MseTarget::mean_density;
    }
    if (s == "bartlett") {
        return MseTarget::bartlett;
    }
    throw ParseError("unknown target \"" + s + "\"");
}

std::pair<double, double> BandwidthPolicy::at(double horizon) const {
    switch (kind) {
    case Kind::optimal: {
        const auto plan = optimal_bandwidths(horizon, beta, c1, c2);
        return {plan.b1, plan.b2};
    }
    case Kind::density_optimal:
        return {optimal_density_bandwidth(horizon, beta, c1), b2};
    case Kind::fixed:
        return {b1, b2};
    }
    return {b1, b2};
}

namespace {

struct Replicate {
    std::optional<double> value;
    std::string failure;
};

} // namespace

MseReport mse_experiment(const LsHawkesModel& model, const MseExperiment& exp,
                         const TimeKernel& k, const FreqKernel& q) {
    if (exp.horizons.empty()) {
        throw DomainError("mse_experiment needs at least one horizon");
    }
    if (exp.replicates == 0) {
        throw DomainError("mse_experiment needs at least one replicate");
    }
    for (std::size_t i = 1; i < exp.horizons.size(); ++i) {
        if (!(exp.horizons[i] > exp.horizons[i - 1])) {
            throw DomainError("horizons must be increasing");
        }
    }
    MseReport report;
    report.target = exp.target;
    report.u0 = exp.u0;
    report.omega0 = exp.omega0;
    report.master_seed = exp.master_seed;
    report.underpowered = exp.replicates < 50;

    const bool bartlett = exp.target == MseTarget::bartlett;
    const double target = bartlett ? local_bartlett(model, exp.u0, exp.omega0)
                                   : local_mean_density(model, exp.u0);

    for (double T : exp.horizons) {
        const auto [b1, b2] = exp.policy.at(T);
        // The part of [0, T] the estimator reads.
        double lo = T * (exp.u0 + b1 * k.support().lo);
        double hi = T * (exp.u0 + b1 * k.support().hi);
        if (bartlett) {
            lo += q.support().lo / b2;
            hi += q.support().hi / b2;
        }
        lo = std::clamp(lo, 0.0, T);
        hi = std::clamp(hi, lo, T);

        EstimatorConfig cfg;
        cfg.b1 = b1;
        cfg.b2 = b2;

        std::vector<Replicate> reps(exp.replicates);
        const std::uint64_t tbits = std::bit_cast<std::uint64_t>(T);
        parallel_for(exp.replicates, [&](std::size_t r) {
            SimulationConfig sc;
            sc.seed = derive_seed(exp.master_seed, tbits, r);
            sc.burn_in = exp.burn_in;
            try {
                const auto events = simulate_ls_hawkes_window(model, T, lo, hi, sc);
                reps[r].value = bartlett ? estimate_bartlett(events, exp.u0, exp.omega0, cfg, k, q)
                                         : estimate_mean_density(events, exp.u0, b1, k);
            } catch (const Error& e) {
                reps[r].failure = e.what();
            }
        });

        MseRecord rec;
        rec.horizon = T;
        rec.b1 = b1;
        rec.b2 = bartlett ? b2 : 0.0;
        rec.target_value = target;
        double sum = 0.0;
        for (const auto& r : reps) {
            if (r.value) {
                sum += *r.value;
                ++rec.replicates;
            } else {
                ++rec.failures;
                rec.failure_messages.push_back(r.failure);
            }
        }
        if (rec.replicates > 0) {
            const double n = static_cast<double>(rec.replicates);
            rec.mean_estimate = sum / n;
            double ss = 0.0;
            for (const auto& r : reps) {
                if (r.value) {
                    ss += (*r.value - rec.mean_estimate) * (*r.value - rec.mean_estimate);
                }
            }
            rec.bias = rec.mean_estimate - target;
            rec.variance = ss / n;
            rec.mse = rec.bias * rec.bias + rec.variance;
        }
        report.records.push_back(std::move(rec));
    }
    return report;
}

RateFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw InsufficientData("power-law fit needs at least two matched points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && ys[i] > 0.0)) {
            throw DomainError("power-law fit needs positive values");
        }
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        const double dy = std::log(ys[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw InsufficientData("power-law fit needs distinct abscissae");
    }
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return f;
}

RateFit fit_rate(const MseReport& report) {
    if (report.records.size() < 4) {
        throw InsufficientData("rate fit needs at least four horizons, got " +
                               std::to_string(report.records.size()));
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : report.records) {
        if (r.replicates == 0) {
            throw InsufficientData("no successful replicate at T=" + std::to_string(r.horizon));
        }
        xs.push_back(r.horizon);
        ys.push_back(r.mse);
    }
    return fit_power_law(xs, ys);
}

GrowthScan variance_growth_scan(const LsHawkesModel& model, double u, std::vector<double> windows,
                                std::size_t replicates, std::uint64_t seed, double max_slope) {
    if (windows.empty() || replicates < 2) {
        throw DomainError("variance scan needs windows and at least two replicates");
    }
    std::sort(windows.begin(), windows.end());
    if (!(windows.front() > 0.0)) {
        throw DomainError("windows must be positive");
    }
    const double longest = std::max(1.0, windows.back());
    std::vector<std::vector<double>> counts(replicates, std::vector<double>(windows.size()));
    parallel_for(replicates, [&](std::size_t r) {
        SimulationConfig sc;
        sc.seed = derive_seed(seed, r);
        const auto events = simulate_frozen(model, u, longest, sc);
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const auto end = std::upper_bound(events.times().begin(), events.times().end(), windows[i]);
            counts[r][i] = static_cast<double>(end - events.times().begin());
        }
    });

    GrowthScan scan;
    scan.u = u;
    scan.expected_limit = kTwoPi * local_bartlett(model, u, 0.0);
    const double n = static_cast<double>(replicates);
    std::vector<double> variances;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        GrowthRecord rec;
        rec.window = windows[i];
        rec.replicates = replicates;
        double sum = 0.0;
        for (const auto& c : counts) {
            sum += c[i];
        }
        rec.mean_count = sum / n;
        double ss = 0.0;
        for (const auto& c : counts) {
            ss += (c[i] - rec.mean_count) * (c[i] - rec.mean_count);
        }
        rec.variance = ss / (n - 1.0);
        rec.ratio = rec.variance / rec.window;
        variances.push_back(rec.variance);
        scan.records.push_back(rec);
    }
    scan.limit_estimate = scan.records.back().ratio;
    if (windows.size() >= 2 && std::all_of(variances.begin(), variances.end(),
                                           [](double v) { return v > 0.0; })) {
        scan.slope = fit_power_law(windows, variances).slope;
        scan.bounded = scan.slope <= max_slope;
    }
    return scan;
}

FreqBiasScan frequency_bias_scan(const LsHawkesModel& model, double u0, double omega0,
                                 std::vector<double> b2s, const FreqKernel& q) {
    FreqBiasScan scan;
    scan.u0 = u0;
    scan.omega0 = omega0;
    scan.target = local_bartlett(model, u0, omega0);
    scan.b2s = std::move(b2s);
    for (double b2 : scan.b2s) {
        scan.gaps.push_back(std::abs(regularized_bartlett(model, u0, omega0, b2, q) - scan.target));
    }
    // Below this the gap is rounding noise of the quadrature.
    const double floor = 1e-12 * std::max(1.0, scan.target);
    const bool any = std::any_of(scan.gaps.begin(), scan.gaps.end(),
                                 [floor](double g) { return g > floor; });
    if (any && scan.b2s.size() >= 2) {
        scan.fit = fit_power_law(scan.b2s, scan.gaps);
    }
    return scan;
}

nlohmann::json to_json(const RateFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

nlohmann::json to_json(const MseReport& r) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : r.records) {
        records.push_back({{"horizon", rec.horizon},
                           {"b1", rec.b1},
                           {"b2", rec.b2},
                           {"replicates", rec.replicates},
                           {"failures", rec.failures},
                           {"failure_messages", rec.failure_messages},
                           {"target_value", rec.target_value},
                           {"mean_estimate", rec.mean_estimate},
                           {"bias", rec.bias},
                           {"variance", rec.variance},
                           {"mse", rec.mse}});
    }
    nlohmann::json j = {{"target", to_string(r.target)},
                        {"u0", r.u0},
                        {"omega0", r.omega0},
                        {"master_seed", r.master_seed},
                        {"underpowered", r.underpowered},
                        {"records", records}};
    if (r.records.size() >= 4) {
        j["fit"] = to_json(fit_rate(r));
    }
    return j;
}

nlohmann::json to_json(const GrowthScan& s) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : s.records) {
        records.push_back({{"window", rec.window},
                           {"replicates", rec.replicates},
                           {"mean_count", rec.mean_count},
                           {"variance", rec.variance},
                           {"ratio", rec.ratio}});
    }
    return {{"u", s.u},
            {"expected_limit", s.expected_limit},
            {"limit_estimate", s.limit_estimate},
            {"slope", s.slope},
            {"bounded", s.bounded},
            {"records", records}};
}

nlohmann::json to_json(const FreqBiasScan& s) {
    nlohmann::json j = {{"u0", s.u0},
                        {"omega0", s.omega0},
                        {"target", s.target},
                        {"b2", s.b2s},
                        {"gaps", s.gaps}};
    j["fit"] = s.fit ? to_json(*s.fit) : nlohmann::json(nullptr);
    return j;
}

} // namespace lshawkes
