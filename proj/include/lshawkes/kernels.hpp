#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lshawkes {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Shape shared by both kernel kinds: a compactly supported function that is
// a polynomial of degree <= 3 between consecutive breakpoints. Evaluation
// returns 0 outside the support.
struct KernelShape {
    std::string name;
    std::function<double(double)> fn;
    Interval support;
    // Sorted, includes both support ends.
    std::vector<double> breakpoints;
};

// Time-localization kernel k: k >= 0, bounded, integral 1.
class TimeKernel {
public:
    // Validates on construction; throws InvalidModel on contract failure.
    explicit TimeKernel(KernelShape shape);

    double operator()(double x) const;
    const Interval& support() const { return shape_.support; }
    const std::vector<double>& breakpoints() const { return shape_.breakpoints; }
    const std::string& name() const { return shape_.name; }

    // Integral of k and of k^2 computed on the polynomial pieces.
    double integral() const;
    double squared_integral() const;

private:
    KernelShape shape_;
};

// Frequency-localization kernel q, normalized so that the weight |Q|^2
// has unit mass: integral of q^2 equals 1/(2 pi).
class FreqKernel {
public:
    using Transform = std::function<std::complex<double>(double)>;

    explicit FreqKernel(KernelShape shape, Transform analytic_transform = {});

    double operator()(double x) const;
    const Interval& support() const { return shape_.support; }
    const std::vector<double>& breakpoints() const { return shape_.breakpoints; }
    const std::string& name() const { return shape_.name; }
    bool even() const { return even_; }

    double squared_integral() const;

    // Q(omega); closed form when one was supplied, quadrature otherwise.
    std::complex<double> transform(double omega) const;
    bool has_analytic_transform() const { return static_cast<bool>(analytic_); }

private:
    KernelShape shape_;
    Transform analytic_;
    bool even_ = false;
};

// k(x) = (2 - 4|x|)_+ on [-1/2, 1/2].
TimeKernel triangle_kernel();
// q(x) = c (1 - 4x^2)_+ on [-1/2, 1/2], c = sqrt(15 / (16 pi)).
FreqKernel epanechnikov_kernel();

// Kernels built from (x, value) samples with linear interpolation. The
// values are rescaled to meet the normalization contract.
TimeKernel time_kernel_from_table(std::vector<double> xs, std::vector<double> values,
                                  std::string name = "table");
FreqKernel freq_kernel_from_table(std::vector<double> xs, std::vector<double> values,
                                  std::string name = "table");

// Reads a two-column CSV (x, value), optional header line.
std::pair<std::vector<double>, std::vector<double>> read_kernel_table(const std::string& path);

// Name lookup ("triangle" / "epanechnikov") or a path to a table CSV.
TimeKernel time_kernel_by_name(const std::string& name_or_path);
FreqKernel freq_kernel_by_name(const std::string& name_or_path);

// w_{b1,T}(t) = (T b1)^{-1} k(t / (T b1)), a probability density in real time.
class ScaledTimeKernel {
public:
    ScaledTimeKernel(TimeKernel k, double b1, double horizon);

    double operator()(double t) const { return k_(t / scale_) / scale_; }
    Interval support() const;
    std::vector<double> breakpoints() const;
    double scale() const { return scale_; }
    const TimeKernel& base() const { return k_; }

private:
    TimeKernel k_;
    double scale_;
};

ScaledTimeKernel scaled_time_kernel(const TimeKernel& k, double b1, double horizon);

// K(t) = b2^{1/2} e^{i omega0 t} q(b2 t).
class ModulatedKernel {
public:
    ModulatedKernel(FreqKernel q, double b2, double omega0);

    std::complex<double> operator()(double t) const;
    Interval support() const;
    std::vector<double> breakpoints() const;
    // Closed-form Fourier transform b2^{-1/2} Q((omega - omega0) / b2).
    std::complex<double> transform(double omega) const;

    double b2() const { return b2_; }
    double omega0() const { return omega0_; }
    const FreqKernel& base() const { return q_; }

private:
    FreqKernel q_;
    double b2_;
    double omega0_;
};

ModulatedKernel modulated_freq_kernel(const FreqKernel& q, double b2, double omega0);

// Q(omega) = int q(t) e^{-i omega t} dt by composite Gauss quadrature with a
// two-resolution agreement check; throws QuadratureFailure if the two
// resolutions disagree.
std::complex<double> freq_kernel_ft(const FreqKernel& q, double omega);

// Generic version for any kernel shape.
std::complex<double> fourier_transform(const KernelShape& shape, double omega);

} // namespace lshawkes
