#include "lshawkes/kernels.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lshawkes {

namespace {

constexpr double kNormTolerance = 1e-9;

double evaluate(const KernelShape& s, double x) {
    if (x < s.support.lo || x > s.support.hi) {
        return 0.0;
    }
    return s.fn(x);
}

template <class F>
double piecewise_integral(const KernelShape& s, F&& g) {
    // Degree <= 3 pieces, so squares are degree <= 6: 5 nodes are exact.
    return numeric::composite_gauss<5>([&](double x) { return g(evaluate(s, x)); },
                                       s.breakpoints, s.support.length());
}

void check_shape(const KernelShape& s) {
    if (!s.fn) {
        throw InvalidModel("kernel \"" + s.name + "\" has no evaluation function");
    }
    if (!(s.support.hi > s.support.lo) || !std::isfinite(s.support.lo) ||
        !std::isfinite(s.support.hi)) {
        throw InvalidModel("kernel \"" + s.name + "\" needs a bounded nonempty support");
    }
}

KernelShape normalized_shape(KernelShape s) {
    s.breakpoints = numeric::clean_breaks(std::move(s.breakpoints), s.support.lo, s.support.hi);
    return s;
}

// Samples used for the pointwise checks.
std::vector<double> sample_points(const Interval& iv, std::size_t n = 4097) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return xs;
}

struct Table {
    std::vector<double> xs;
    std::vector<double> ys;
};

Table check_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw InvalidModel("kernel table needs at least two (x, value) rows");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw InvalidModel("kernel table entries must be finite");
        }
        if (i > 0 && !(xs[i] > xs[i - 1])) {
            throw InvalidModel("kernel table abscissae must be strictly increasing");
        }
    }
    return {std::move(xs), std::move(ys)};
}

KernelShape table_shape(Table t, std::string name) {
    auto xs = std::make_shared<const std::vector<double>>(t.xs);
    auto ys = std::make_shared<const std::vector<double>>(t.ys);
    KernelShape s;
    s.name = std::move(name);
    s.support = {t.xs.front(), t.xs.back()};
    s.breakpoints = t.xs;
    s.fn = [xs, ys](double x) {
        const auto& X = *xs;
        const auto& Y = *ys;
        if (x <= X.front()) {
            return Y.front();
        }
        if (x >= X.back()) {
            return Y.back();
        }
        const auto i = static_cast<std::size_t>(std::upper_bound(X.begin(), X.end(), x) - X.begin());
        const double w = (x - X[i - 1]) / (X[i] - X[i - 1]);
        return Y[i - 1] + w * (Y[i] - Y[i - 1]);
    };
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

// ---------------------------------------------------------------- TimeKernel

TimeKernel::TimeKernel(KernelShape shape) : shape_(normalized_shape(std::move(shape))) {
    check_shape(shape_);
    const double mass = integral();
    if (std::abs(mass - 1.0) > kNormTolerance) {
        throw InvalidModel("time kernel \"" + shape_.name + "\" integrates to " +
                           std::to_string(mass) + ", expected 1");
    }
    for (double x : sample_points(shape_.support)) {
        const double v = shape_.fn(x);
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidModel("time kernel \"" + shape_.name + "\" must be finite and nonnegative");
        }
    }
}

double TimeKernel::operator()(double x) const {
    return evaluate(shape_, x);
}

double TimeKernel::integral() const {
    return piecewise_integral(shape_, [](double v) { return v; });
}

double TimeKernel::squared_integral() const {
    return piecewise_integral(shape_, [](double v) { return v * v; });
}

// ---------------------------------------------------------------- FreqKernel

FreqKernel::FreqKernel(KernelShape shape, Transform analytic_transform)
    : shape_(normalized_shape(std::move(shape))), analytic_(std::move(analytic_transform)) {
    check_shape(shape_);
    const double sq = squared_integral();
    if (std::abs(sq - 1.0 / kTwoPi) > kNormTolerance) {
        throw InvalidModel("frequency kernel \"" + shape_.name + "\" has squared integral " +
                           std::to_string(sq) + ", expected 1/(2 pi)");
    }
    even_ = std::abs(shape_.support.lo + shape_.support.hi) <= 1e-12 * shape_.support.length();
    for (double x : sample_points(shape_.support)) {
        const double v = shape_.fn(x);
        if (!std::isfinite(v)) {
            throw InvalidModel("frequency kernel \"" + shape_.name + "\" must be bounded");
        }
        if (even_ && std::abs(v - shape_.fn(-x)) > 1e-12 * (1.0 + std::abs(v))) {
            even_ = false;
        }
    }
}

double FreqKernel::operator()(double x) const {
    return evaluate(shape_, x);
}

double FreqKernel::squared_integral() const {
    return piecewise_integral(shape_, [](double v) { return v * v; });
}

std::complex<double> FreqKernel::transform(double omega) const {
    if (analytic_) {
        return analytic_(omega);
    }
    return fourier_transform(shape_, omega);
}

// ---------------------------------------------------------------- built-ins

TimeKernel triangle_kernel() {
    KernelShape s;
    s.name = "triangle";
    s.support = {-0.5, 0.5};
    s.breakpoints = {-0.5, 0.0, 0.5};
    s.fn = [](double x) { return std::max(0.0, 2.0 - 4.0 * std::abs(x)); };
    return TimeKernel(std::move(s));
}

FreqKernel epanechnikov_kernel() {
    const double c = std::sqrt(15.0 / (16.0 * kPi));
    KernelShape s;
    s.name = "epanechnikov";
    s.support = {-0.5, 0.5};
    s.breakpoints = {-0.5, 0.5};
    s.fn = [c](double x) { return std::max(0.0, c * (1.0 - 4.0 * x * x)); };
    // int_{-1/2}^{1/2} (1 - 4t^2) cos(w t) dt = 16 (sin(w/2) - (w/2) cos(w/2)) / w^3
    auto ft = [c](double omega) {
        const double h = 0.5 * omega;
        double value;
        if (std::abs(h) < 1e-3) {
            const double h2 = h * h;
            value = 2.0 * (1.0 / 3.0 - h2 / 30.0 + h2 * h2 / 840.0);
        } else {
            value = 2.0 * (std::sin(h) - h * std::cos(h)) / (h * h * h);
        }
        return std::complex<double>(c * value, 0.0);
    };
    return FreqKernel(std::move(s), ft);
}

TimeKernel time_kernel_from_table(std::vector<double> xs, std::vector<double> values,
                                  std::string name) {
    auto t = check_table(std::move(xs), std::move(values));
    double mass = 0.0;
    for (std::size_t i = 1; i < t.xs.size(); ++i) {
        mass += 0.5 * (t.ys[i] + t.ys[i - 1]) * (t.xs[i] - t.xs[i - 1]);
    }
    if (!(mass > 0.0)) {
        throw InvalidModel("time kernel table must have positive mass");
    }
    for (auto& y : t.ys) {
        y /= mass;
    }
    return TimeKernel(table_shape(std::move(t), std::move(name)));
}

FreqKernel freq_kernel_from_table(std::vector<double> xs, std::vector<double> values,
                                  std::string name) {
    auto t = check_table(std::move(xs), std::move(values));
    double sq = 0.0;
    for (std::size_t i = 1; i < t.xs.size(); ++i) {
        const double a = t.ys[i - 1];
        const double b = t.ys[i];
        sq += (a * a + a * b + b * b) * (t.xs[i] - t.xs[i - 1]) / 3.0;
    }
    if (!(sq > 0.0)) {
        throw InvalidModel("frequency kernel table must not vanish");
    }
    const double scale = 1.0 / std::sqrt(kTwoPi * sq);
    for (auto& y : t.ys) {
        y *= scale;
    }
    return FreqKernel(table_shape(std::move(t), std::move(name)));
}

std::pair<std::vector<double>, std::vector<double>> read_kernel_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open kernel table " + path);
    }
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x = 0.0;
        double y = 0.0;
        if (!(ss >> x >> y)) {
            if (xs.empty() && line_no == 1) {
                continue; // header
            }
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected two numbers");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    return {std::move(xs), std::move(ys)};
}

TimeKernel time_kernel_by_name(const std::string& name_or_path) {
    const auto n = lower(name_or_path);
    if (n == "triangle") {
        return triangle_kernel();
    }
    auto [xs, ys] = read_kernel_table(name_or_path);
    return time_kernel_from_table(std::move(xs), std::move(ys), name_or_path);
}

FreqKernel freq_kernel_by_name(const std::string& name_or_path) {
    const auto n = lower(name_or_path);
    if (n == "epanechnikov") {
        return epanechnikov_kernel();
    }
    auto [xs, ys] = read_kernel_table(name_or_path);
    return freq_kernel_from_table(std::move(xs), std::move(ys), name_or_path);
}

// ---------------------------------------------------------------- scaling

ScaledTimeKernel::ScaledTimeKernel(TimeKernel k, double b1, double horizon)
    : k_(std::move(k)), scale_(b1 * horizon) {
    if (!(b1 > 0.0) || !(horizon > 0.0)) {
        throw DomainError("scaled time kernel needs b1 > 0 and T > 0");
    }
}

Interval ScaledTimeKernel::support() const {
    return {k_.support().lo * scale_, k_.support().hi * scale_};
}

std::vector<double> ScaledTimeKernel::breakpoints() const {
    std::vector<double> b = k_.breakpoints();
    for (auto& x : b) {
        x *= scale_;
    }
    return b;
}

ScaledTimeKernel scaled_time_kernel(const TimeKernel& k, double b1, double horizon) {
    return ScaledTimeKernel(k, b1, horizon);
}

ModulatedKernel::ModulatedKernel(FreqKernel q, double b2, double omega0)
    : q_(std::move(q)), b2_(b2), omega0_(omega0) {
    if (!(b2 > 0.0) || !std::isfinite(omega0)) {
        throw DomainError("modulated kernel needs b2 > 0 and finite omega0");
    }
}

std::complex<double> ModulatedKernel::operator()(double t) const {
    const double v = q_(b2_ * t);
    if (v == 0.0) {
        return {0.0, 0.0};
    }
    return std::sqrt(b2_) * v * std::polar(1.0, omega0_ * t);
}

Interval ModulatedKernel::support() const {
    return {q_.support().lo / b2_, q_.support().hi / b2_};
}

std::vector<double> ModulatedKernel::breakpoints() const {
    std::vector<double> b = q_.breakpoints();
    for (auto& x : b) {
        x /= b2_;
    }
    return b;
}

std::complex<double> ModulatedKernel::transform(double omega) const {
    return q_.transform((omega - omega0_) / b2_) / std::sqrt(b2_);
}

ModulatedKernel modulated_freq_kernel(const FreqKernel& q, double b2, double omega0) {
    return ModulatedKernel(q, b2, omega0);
}

// ---------------------------------------------------------------- transforms

std::complex<double> fourier_transform(const KernelShape& shape, double omega) {
    const double len = shape.support.length();
    // Panels no longer than a quarter period, and at least a few per piece.
    const double panel = std::min(len / 4.0, omega == 0.0 ? len : kPi / (2.0 * std::abs(omega)));
    if (len / panel > 5e6) {
        throw QuadratureFailure("Fourier quadrature at omega=" + std::to_string(omega) +
                                " needs too many panels");
    }
    auto f = [&](double t) { return evaluate(shape, t) * std::polar(1.0, -omega * t); };
    const auto coarse = numeric::composite_gauss<8>(f, shape.breakpoints, panel);
    const auto fine = numeric::composite_gauss<16>(f, shape.breakpoints, panel);
    const double scale = numeric::composite_gauss<8>(
        [&](double t) { return std::abs(evaluate(shape, t)); }, shape.breakpoints, panel);
    if (std::abs(coarse - fine) > 1e-10 * std::max(scale, 1e-300)) {
        throw QuadratureFailure("Fourier quadrature did not converge at omega=" +
                                std::to_string(omega));
    }
    return fine;
}

std::complex<double> freq_kernel_ft(const FreqKernel& q, double omega) {
    KernelShape s;
    s.name = q.name();
    s.support = q.support();
    s.breakpoints = q.breakpoints();
    s.fn = [&q](double x) { return q(x); };
    return fourier_transform(s, omega);
}

} // namespace lshawkes
