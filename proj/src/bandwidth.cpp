#include "lshawkes/bandwidth.hpp"

#include "lshawkes/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lshawkes {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("beta must lie in (0, 1]");
    }
}

} // namespace

void check_admissible(const BandwidthPlan& p) {
    if (!(p.horizon >= 1.0)) {
        throw InadmissiblePlan("horizon must be >= 1");
    }
    if (!(p.b1 > 0.0 && p.b1 <= 1.0) || !(p.b2 > 0.0 && p.b2 <= 1.0)) {
        throw InadmissiblePlan("bandwidths must lie in (0, 1]");
    }
    if (p.horizon * p.b1 * p.b2 < 1.0) {
        throw InadmissiblePlan("T b1 b2 = " + std::to_string(p.horizon * p.b1 * p.b2) + " < 1");
    }
    if (p.b1 * std::log(p.horizon) > 1.0) {
        throw InadmissiblePlan("b1 ln T = " + std::to_string(p.b1 * std::log(p.horizon)) + " > 1");
    }
}

BandwidthPlan optimal_bandwidths(double horizon, double beta, double c1, double c2) {
    check_beta(beta);
    if (!(horizon >= 1.0)) {
        throw DomainError("horizon must be >= 1");
    }
    if (!(c1 > 0.0 && c2 > 0.0)) {
        throw DomainError("bandwidth constants must be positive");
    }
    BandwidthPlan p;
    p.horizon = horizon;
    p.beta = beta;
    p.c1 = c1;
    p.c2 = c2;
    const double denom = 2.0 + 5.0 * beta;
    p.b1 = std::min(1.0, c1 * std::pow(horizon, -2.0 / denom));
    p.b2 = std::min(1.0, c2 * std::pow(horizon, -beta / denom));
    check_admissible(p);
    return p;
}

double optimal_density_bandwidth(double horizon, double beta, double c1) {
    check_beta(beta);
    if (!(horizon >= 1.0)) {
        throw DomainError("horizon must be >= 1");
    }
    return std::min(1.0, c1 * std::pow(horizon, -1.0 / (2.0 * beta + 1.0)));
}

std::pair<double, double> predicted_mse_rate(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("beta must lie in (0, 1]");
    }
    return {-2.0 * beta / (2.0 * beta + 1.0), -4.0 * beta / (5.0 * beta + 2.0)};
}

} // namespace lshawkes
