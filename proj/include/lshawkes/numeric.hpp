#pragma once

// Small numerical helpers shared by the modules: fixed Gauss-Legendre
// rules, seeded random streams and an index-parallel loop.

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace lshawkes {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace numeric {

// Full (symmetric) Gauss-Legendre nodes and weights on [-1, 1].
template <std::size_t N>
struct GaussRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussRule() {
        using Boost = boost::math::quadrature::gauss<double, N>;
        const auto& x = Boost::abscissa();
        const auto& w = Boost::weights();
        std::size_t i = 0;
        // Boost stores the nonnegative half; mirror it.
        for (std::size_t j = x.size(); j-- > 0;) {
            if (x[j] == 0.0) {
                continue;
            }
            nodes[i] = -x[j];
            weights[i] = w[j];
            ++i;
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            nodes[i] = x[j];
            weights[i] = w[j];
            ++i;
        }
    }
};

template <std::size_t N>
const GaussRule<N>& gauss_rule() {
    static const GaussRule<N> rule;
    return rule;
}

// Integrates f over [a, b] with an N-point Gauss-Legendre rule.
template <std::size_t N, class F>
auto gauss_integrate(F&& f, double a, double b) {
    const auto& rule = gauss_rule<N>();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(mid)) acc{};
    for (std::size_t i = 0; i < N; ++i) {
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return acc * half;
}

// Composite rule over sorted breakpoints; each piece is split into
// sub-panels no longer than max_panel.
template <std::size_t N, class F>
auto composite_gauss(F&& f, const std::vector<double>& breaks, double max_panel) {
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (!(b > a)) {
            continue;
        }
        const auto pieces = static_cast<std::size_t>(std::ceil((b - a) / max_panel));
        const std::size_t n = pieces == 0 ? 1 : pieces;
        const double h = (b - a) / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double lo = a + h * static_cast<double>(j);
            const double hi = (j + 1 == n) ? b : lo + h;
            acc += gauss_integrate<N>(f, lo, hi);
        }
    }
    return acc;
}

// Sorts and removes duplicates, keeping only points inside [lo, hi]
// and always including both ends.
std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi);

} // namespace numeric

// Replicate stream derivation: seed = mix(master, path...).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::mt19937_64 gen_;
};

// Runs body(i) for i in [0, n) on the available hardware threads.
// The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace lshawkes
