#pragma once

#include "lshawkes/kernels.hpp"
#include "lshawkes/simulate.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lshawkes {

enum class FeasibilityMode { strict, warn };

struct EstimatorConfig {
    double b1 = 0.15;      // time bandwidth, fraction of the horizon
    double b2 = 0.1;       // frequency bandwidth, rad per unit real time
    int quad_nodes = 64;   // minimum Gauss nodes across a kernel support
    FeasibilityMode feasibility = FeasibilityMode::strict;
    // Recompute the oscillatory linear term on a halved panel grid and
    // fail with ResolutionError if the two disagree.
    bool refinement_check = true;
};

// Support conditions for observation on [0, T]:
//   mean density: u0 + b1 Supp(k) in [0, 1]
//   Bartlett:     u0 + b1 Supp(k) + (T b2)^{-1} Supp(q) in [0, 1]
struct Feasibility {
    bool mean_density = false;
    bool bartlett = false;
};

Feasibility check_feasibility(double u0, double b1, double b2, double horizon, const TimeKernel& k,
                              const FreqKernel& q);

// sum_j (T b1)^{-1} k((t_j - T u0) / (T b1))
double estimate_mean_density(const EventSeries& events, double u0, double b1, const TimeKernel& k,
                             FeasibilityMode mode = FeasibilityMode::strict);

// A compactly supported complex test function f, polynomial (times an
// optional e^{i omega t} factor with |omega| <= max_frequency) between
// breakpoints.
struct TestFunction {
    std::function<std::complex<double>(double)> fn;
    Interval support;
    std::vector<double> breakpoints;
    double max_frequency = 0.0;
};

// A real weight function, polynomial between breakpoints.
struct Weight {
    std::function<double(double)> fn;
    Interval support;
    std::vector<double> breakpoints;
};

// t -> K(t - shift)
TestFunction shifted_test_function(const ModulatedKernel& kernel, double shift);
Weight as_weight(const ScaledTimeKernel& w);

enum class MomentKind { linear, squared_modulus };

// int rho( sum_k f(t_k - t) ) w(t) dt by composite Gauss quadrature over
// Supp(w), split at every kernel breakpoint.
std::complex<double> empirical_moment(const EventSeries& events, const TestFunction& f,
                                      const Weight& w, MomentKind rho, int quad_nodes = 64,
                                      bool refinement_check = true);

// The linear moment through the identity int N(f(. - t)) w(t) dt = N(f * w).
std::complex<double> convolution_moment(const EventSeries& events, const TestFunction& f,
                                        const Weight& w);

// The local Bartlett estimator at (u0, omega0).
double estimate_bartlett(const EventSeries& events, double u0, double omega0,
                         const EstimatorConfig& cfg, const TimeKernel& k, const FreqKernel& q);

// Same estimator at several frequencies sharing one time location; the
// frequency-independent work is done once.
std::vector<double> estimate_bartlett(const EventSeries& events, double u0,
                                      std::span<const double> omegas, const EstimatorConfig& cfg,
                                      const TimeKernel& k, const FreqKernel& q);

// Values over (time x frequency); missing entries mark infeasible points.
struct TFGrid {
    enum class Kind { mean_density, bartlett, poisson_normalized };

    Kind kind = Kind::bartlett;
    std::vector<double> times;
    std::vector<double> freqs;  // rad per unit time; empty for mean density
    std::vector<std::optional<double>> values;  // row-major, one row per time

    TFGrid() = default;
    TFGrid(Kind kind, std::vector<double> times, std::vector<double> freqs);

    std::size_t columns() const { return freqs.empty() ? 1 : freqs.size(); }
    std::optional<double>& at(std::size_t i, std::size_t j) { return values[i * columns() + j]; }
    const std::optional<double>& at(std::size_t i, std::size_t j) const {
        return values[i * columns() + j];
    }
    bool operator==(const TFGrid&) const = default;
};

std::string to_string(TFGrid::Kind kind);
TFGrid::Kind tf_kind_from_string(const std::string& s);

TFGrid estimate_tf_grid(const EventSeries& events, const std::vector<double>& times,
                        const std::vector<double>& freqs, const EstimatorConfig& cfg,
                        const TimeKernel& k, const FreqKernel& q);

// m-hat over a list of times (a single-column grid).
TFGrid estimate_mean_density_curve(const EventSeries& events, const std::vector<double>& times,
                                   double b1, const TimeKernel& k);

} // namespace lshawkes
