#pragma once

#include "lshawkes/curve.hpp"
#include "lshawkes/kernels.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lshawkes {

// Immigrant intensity lambda_c(u), events per unit real time.
struct BaselineCurve {
    Curve curve;
    double sup_bound = 0.0;     // declared ||lambda_c||_inf
    double holder_beta = 1.0;   // in (0, 1]
    double holder_const = 0.0;  // |lambda_c(v) - lambda_c(u)| <= C |v - u|^beta

    double operator()(double u) const { return curve(u); }

    // Fills sup_bound / holder_const from the curve's exact range and slope.
    static BaselineCurve from_curve(Curve c, double beta = 1.0);
};

// Local fertility p(s; u), s >= 0 in real time, u absolute time.
class FertilityFamily {
public:
    enum class Kind { zero, exponential, gamma_shape, sampled_table };

    static FertilityFamily zero();
    // zeta(u) decay(u) e^{-decay(u) s}
    static FertilityFamily exponential(Curve zeta, Curve decay);
    // zeta(u) decay^k s^{k-1} e^{-decay s} / (k-1)!, integer shape k >= 1
    static FertilityFamily gamma_shape(Curve zeta, Curve decay, int shape);
    // zeta(u) g(s), g the unit-mass linear interpolant of values at s = i*ds
    static FertilityFamily sampled_table(Curve zeta, double ds, std::vector<double> values);

    Kind kind() const { return kind_; }
    const Curve& zeta_curve() const { return zeta_; }
    const Curve& decay_curve() const { return decay_; }
    int shape() const { return shape_; }
    double table_step() const { return ds_; }
    const std::vector<double>& table_values() const { return table_; }

    double zeta(double u) const;
    double density(double s, double u) const;

    // p-hat(omega; u). Closed form for the parametric families; trapezoid
    // quadrature with a 10x refinement check for tables.
    std::complex<double> transform(double omega, double u) const;

    // Nonincreasing s -> sup_{s' >= s} sup_u p(s'; u).
    double majorant(double s) const;
    // Smallest s beyond which majorant(s) < eps.
    double truncation_horizon(double eps) const;

    // Exponential envelope p(s;u) <= tail_const e^{-tail_rate s}.
    double tail_rate() const { return tail_rate_; }
    double tail_const() const { return tail_const_; }
    void set_tail(double rate, double c);

    std::optional<double> holder_envelope_l1() const { return holder_l1_; }
    void set_holder_envelope_l1(double v) { holder_l1_ = v; }

    // Fixes every curve at absolute time u.
    FertilityFamily frozen_at(double u) const;

private:
    void default_tail();

    Kind kind_ = Kind::zero;
    Curve zeta_ = Curve::constant(0.0);
    Curve decay_ = Curve::constant(1.0);
    int shape_ = 1;
    double ds_ = 0.0;
    std::vector<double> table_;      // unit-mass shape
    std::vector<double> suffix_max_; // table_ suffix maxima
    double tail_rate_ = 1.0;
    double tail_const_ = 0.0;
    std::optional<double> holder_l1_;
};

std::string to_string(FertilityFamily::Kind kind);

struct LsHawkesModel {
    BaselineCurve baseline;
    FertilityFamily fertility;
    double beta = 1.0;

    // The stationary comparison model N(.; u): every curve held at u.
    LsHawkesModel frozen_at(double u) const;
};

struct ConditionCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string note;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    bool passed = false;

    const ConditionCheck* find(const std::string& name) const;
};

// Numerical check of subcriticality, boundedness, causality, the
// exponential envelope and the Hölder conditions on sampled grids. Failures
// are reported, not thrown.
ValidationReport validate_model(const LsHawkesModel& model, int grid_resolution = 64);

// lambda_c(u) / (1 - zeta(u)); InvalidModel when zeta(u) >= 1.
double local_mean_density(const LsHawkesModel& model, double u);

std::complex<double> fertility_ft(const LsHawkesModel& model, double u, double omega);

// (m1(u) / 2 pi) |1 - p-hat(omega; u)|^{-2}
double local_bartlett(const LsHawkesModel& model, double u, double omega);

// int b2^{-1} |Q((omega - omega0)/b2)|^2 gamma(u0; omega) d omega
double regularized_bartlett(const LsHawkesModel& model, double u0, double omega0, double b2,
                            const FreqKernel& q);

// m1 (m1 / (2 pi gamma(0)))^{1/2}
double identify_baseline(double m1, double gamma_at_zero);

} // namespace lshawkes
