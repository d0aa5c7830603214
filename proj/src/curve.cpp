#include "lshawkes/curve.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace lshawkes {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double u) {
    if (u <= xs.front()) {
        return ys.front();
    }
    if (u >= xs.back()) {
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), u);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double x0 = xs[i - 1];
    const double x1 = xs[i];
    const double t = (u - x0) / (x1 - x0);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

} // namespace

std::string to_string(Curve::Form form) {
    switch (form) {
    case Curve::Form::constant:
        return "constant";
    case Curve::Form::sinusoidal:
        return "sinusoidal";
    case Curve::Form::piecewise_linear:
        return "piecewise-linear";
    case Curve::Form::sampled_table:
        return "sampled-table";
    }
    return "unknown";
}

Curve Curve::constant(double value) {
    if (!std::isfinite(value)) {
        throw InvalidModel("constant curve value must be finite");
    }
    Curve c;
    c.form_ = Form::constant;
    c.params_ = {value};
    return c;
}

Curve Curve::sinusoidal(double mean, double amplitude, double cycles, double phase) {
    if (!std::isfinite(mean) || !std::isfinite(amplitude) || !std::isfinite(cycles) ||
        !std::isfinite(phase)) {
        throw InvalidModel("sinusoidal curve parameters must be finite");
    }
    Curve c;
    c.form_ = Form::sinusoidal;
    c.params_ = {mean, amplitude, cycles, phase};
    return c;
}

Curve Curve::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) {
        throw InvalidModel("piecewise-linear curve needs at least one knot");
    }
    std::sort(knots.begin(), knots.end());
    Curve c;
    c.form_ = Form::piecewise_linear;
    for (const auto& [x, y] : knots) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw InvalidModel("piecewise-linear knots must be finite");
        }
        if (!c.xs_.empty() && x == c.xs_.back()) {
            throw InvalidModel("piecewise-linear knots must have distinct abscissae");
        }
        c.xs_.push_back(x);
        c.ys_.push_back(y);
    }
    return c;
}

Curve Curve::sampled_table(double start, double step, std::vector<double> values) {
    if (values.empty() || !(step > 0.0) || !std::isfinite(start)) {
        throw InvalidModel("sampled-table curve needs values and a positive step");
    }
    Curve c;
    c.form_ = Form::sampled_table;
    c.params_ = {start, step};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidModel("sampled-table values must be finite");
        }
        c.xs_.push_back(start + step * static_cast<double>(i));
    }
    c.ys_ = std::move(values);
    return c;
}

double Curve::operator()(double u) const {
    switch (form_) {
    case Form::constant:
        return params_[0];
    case Form::sinusoidal:
        return params_[0] + params_[1] * std::sin(kTwoPi * params_[2] * u + params_[3]);
    case Form::piecewise_linear:
    case Form::sampled_table:
        return interp(xs_, ys_, u);
    }
    return 0.0;
}

bool Curve::is_constant() const {
    switch (form_) {
    case Form::constant:
        return true;
    case Form::sinusoidal:
        return params_[1] == 0.0 || params_[2] == 0.0;
    default:
        return std::all_of(ys_.begin(), ys_.end(), [&](double y) { return y == ys_.front(); });
    }
}

double Curve::min_value() const {
    switch (form_) {
    case Form::constant:
        return params_[0];
    case Form::sinusoidal:
        if (params_[2] == 0.0) {
            return params_[0] + params_[1] * std::sin(params_[3]);
        }
        return params_[0] - std::abs(params_[1]);
    default:
        return *std::min_element(ys_.begin(), ys_.end());
    }
}

double Curve::max_value() const {
    switch (form_) {
    case Form::constant:
        return params_[0];
    case Form::sinusoidal:
        if (params_[2] == 0.0) {
            return params_[0] + params_[1] * std::sin(params_[3]);
        }
        return params_[0] + std::abs(params_[1]);
    default:
        return *std::max_element(ys_.begin(), ys_.end());
    }
}

double Curve::lipschitz() const {
    switch (form_) {
    case Form::constant:
        return 0.0;
    case Form::sinusoidal:
        return kTwoPi * std::abs(params_[1] * params_[2]);
    default: {
        double l = 0.0;
        for (std::size_t i = 1; i < xs_.size(); ++i) {
            l = std::max(l, std::abs(ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
        }
        return l;
    }
    }
}

nlohmann::json Curve::to_json() const {
    nlohmann::json j;
    j["form"] = to_string(form_);
    switch (form_) {
    case Form::constant:
        j["params"] = {{"value", params_[0]}};
        break;
    case Form::sinusoidal:
        j["params"] = {{"mean", params_[0]},
                       {"amplitude", params_[1]},
                       {"cycles", params_[2]},
                       {"phase", params_[3]}};
        break;
    case Form::piecewise_linear: {
        nlohmann::json knots = nlohmann::json::array();
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            knots.push_back({xs_[i], ys_[i]});
        }
        j["params"] = {{"knots", knots}};
        break;
    }
    case Form::sampled_table:
        j["params"] = {{"start", params_[0]}, {"step", params_[1]}, {"values", ys_}};
        break;
    }
    return j;
}

Curve Curve::from_json(const nlohmann::json& j) {
    // A bare number is shorthand for a constant curve.
    if (j.is_number()) {
        return constant(j.get<double>());
    }
    if (!j.is_object() || !j.contains("form")) {
        throw ParseError("curve must be a number or an object with a \"form\" field");
    }
    const auto form = j.at("form").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    try {
        if (form == "constant") {
            return constant(params.at("value").get<double>());
        }
        if (form == "sinusoidal") {
            return sinusoidal(params.at("mean").get<double>(), params.value("amplitude", 0.0),
                              params.value("cycles", 1.0), params.value("phase", 0.0));
        }
        if (form == "piecewise-linear") {
            std::vector<std::pair<double, double>> knots;
            for (const auto& k : params.at("knots")) {
                knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
            }
            return piecewise_linear(std::move(knots));
        }
        if (form == "sampled-table") {
            return sampled_table(params.value("start", 0.0), params.at("step").get<double>(),
                                 params.at("values").get<std::vector<double>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("curve \"" + form + "\": " + e.what());
    }
    throw ParseError("unknown curve form \"" + form + "\"");
}

} // namespace lshawkes
