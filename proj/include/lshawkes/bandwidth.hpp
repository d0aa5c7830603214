#pragma once

#include <utility>

namespace lshawkes {

struct BandwidthPlan {
    double b1 = 1.0;
    double b2 = 1.0;
    double horizon = 1.0;
    double beta = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

// Throws InadmissiblePlan unless T >= 1, b1, b2 in (0, 1], T b1 b2 >= 1 and
// b1 ln T <= 1.
void check_admissible(const BandwidthPlan& plan);

// b1 = min(1, c1 T^{-2/(2+5 beta)}), b2 = min(1, c2 T^{-beta/(2+5 beta)})
BandwidthPlan optimal_bandwidths(double horizon, double beta, double c1 = 1.0, double c2 = 1.0);

// b1 = min(1, c1 T^{-1/(2 beta + 1)}), for the mean density alone.
double optimal_density_bandwidth(double horizon, double beta, double c1 = 1.0);

// MSE exponents (mean density, Bartlett): (-2b/(2b+1), -4b/(5b+2)).
std::pair<double, double> predicted_mse_rate(double beta);

} // namespace lshawkes
