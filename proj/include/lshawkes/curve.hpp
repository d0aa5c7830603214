#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace lshawkes {

// A real function of absolute time u. All forms are defined on the whole
// real line; tabulated forms extend their end values as constants.
class Curve {
public:
    enum class Form { constant, sinusoidal, piecewise_linear, sampled_table };

    Curve() = default;

    static Curve constant(double value);
    // mean + amplitude * sin(2 pi cycles u + phase)
    static Curve sinusoidal(double mean, double amplitude, double cycles, double phase = 0.0);
    static Curve piecewise_linear(std::vector<std::pair<double, double>> knots);
    static Curve sampled_table(double start, double step, std::vector<double> values);

    double operator()(double u) const;

    Form form() const { return form_; }
    bool is_constant() const;

    // Exact extremes over the real line.
    double min_value() const;
    double max_value() const;
    // Exact Lipschitz constant over the real line.
    double lipschitz() const;

    nlohmann::json to_json() const;
    static Curve from_json(const nlohmann::json& j);

private:
    Form form_ = Form::constant;
    // constant: {value}; sinusoidal: {mean, amplitude, cycles, phase}
    std::vector<double> params_{0.0};
    // tabulated forms
    std::vector<double> xs_;
    std::vector<double> ys_;
};

std::string to_string(Curve::Form form);

} // namespace lshawkes
