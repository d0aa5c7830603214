#include "lshawkes/estimate.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>

namespace lshawkes {

namespace {

constexpr double kMaxPanels = 2e7;

bool inside_unit(double lo, double hi) {
    return lo >= 0.0 && hi <= 1.0;
}

std::string describe(double u0, double b1, double b2) {
    return "u0=" + std::to_string(u0) + " b1=" + std::to_string(b1) + " b2=" + std::to_string(b2);
}

void infeasible(FeasibilityMode mode, const std::string& what) {
    if (mode == FeasibilityMode::strict) {
        throw InfeasibleEstimate(what);
    }
    std::clog << "warning: " << what << '\n';
}

// Index range of sorted times inside [lo, hi].
std::pair<std::size_t, std::size_t> index_range(const std::vector<double>& t, double lo, double hi) {
    const auto a = std::lower_bound(t.begin(), t.end(), lo);
    const auto b = std::upper_bound(a, t.end(), hi);
    return {static_cast<std::size_t>(a - t.begin()), static_cast<std::size_t>(b - t.begin())};
}

void check_config(const EstimatorConfig& cfg) {
    if (!(cfg.b1 > 0.0 && cfg.b1 <= 1.0)) {
        throw DomainError("b1 must lie in (0, 1]");
    }
    if (!(cfg.b2 > 0.0 && cfg.b2 <= 1.0)) {
        throw DomainError("b2 must lie in (0, 1]");
    }
    if (cfg.quad_nodes < 64) {
        throw DomainError("quad_nodes must be at least 64");
    }
}

bool uniformly_spaced(std::span<const double> xs) {
    if (xs.size() < 3) {
        return false;
    }
    const double step = xs[1] - xs[0];
    for (std::size_t i = 2; i < xs.size(); ++i) {
        if (std::abs((xs[i] - xs[i - 1]) - step) > 1e-12 * (std::abs(step) + std::abs(xs[i]))) {
            return false;
        }
    }
    return true;
}

// Accumulates sum_n c_n e^{i omega theta_n} for every omega in the list.
void accumulate_phases(std::span<const double> omegas, bool uniform, double theta, std::complex<double> c,
                       std::vector<std::complex<double>>& out) {
    if (uniform) {
        auto z = c * std::polar(1.0, omegas[0] * theta);
        const auto rot = std::polar(1.0, (omegas[1] - omegas[0]) * theta);
        for (std::size_t f = 0; f < omegas.size(); ++f) {
            out[f] += z;
            z *= rot;
        }
        return;
    }
    for (std::size_t f = 0; f < omegas.size(); ++f) {
        out[f] += c * std::polar(1.0, omegas[f] * theta);
    }
}

// Estimator terms at one time location. The squared moment is reduced to a
// sum over event pairs,
//   int |sum_j K(t_j - s)|^2 w(s) ds
//     = sum_{j,l} e^{i w0 (t_j - t_l)} b2 int q(b2(t_j - s)) q(b2(t_l - s)) w(s) ds,
// whose integrals do not depend on the frequency and are exact on the
// polynomial pieces. The linear moment uses the convolution identity.
class LocalSpectralEngine {
public:
    LocalSpectralEngine(const EventSeries& events, double u0, const EstimatorConfig& cfg,
                        const TimeKernel& k, const FreqKernel& q, double omega_max)
        : times_(events.times()), cfg_(cfg), k_(k), q_(q) {
        const double T = events.horizon();
        center_ = T * u0;
        scale_ = T * cfg.b1;
        wlo_ = center_ + scale_ * k.support().lo;
        whi_ = center_ + scale_ * k.support().hi;
        for (double b : k.breakpoints()) {
            wbreaks_.push_back(center_ + scale_ * b);
        }
        qlo_ = q.support().lo / cfg.b2;
        qhi_ = q.support().hi / cfg.b2;
        for (double b : q.breakpoints()) {
            qbreaks_.push_back(b / cfg.b2);
        }
        std::tie(first_, last_) = index_range(times_, wlo_ + qlo_, whi_ + qhi_);

        const double klen = qhi_ - qlo_;
        panel_ = klen * 8.0 / cfg.quad_nodes;
        if (omega_max > 0.0) {
            panel_ = std::min(panel_, kPi / omega_max);
        }
        const double per_event = klen / panel_;
        if (per_event > kMaxPanels / 8.0) {
            throw ResolutionError("frequency " + std::to_string(omega_max) +
                                  " needs too many quadrature panels per kernel support");
        }
        build_pairs();
        build_segments(first_, last_, panel_, segments_, coef_);
        if (cfg.refinement_check && omega_max > 0.0 && last_ > first_) {
            check_resolution(omega_max);
        }
    }

    std::vector<double> bartlett(std::span<const double> omegas) const {
        const bool uniform = uniformly_spaced(omegas);
        std::vector<std::complex<double>> second(omegas.size());
        std::vector<std::complex<double>> first(omegas.size());
        for (const auto& p : pairs_) {
            accumulate_phases(omegas, uniform, p.lag, {p.value, 0.0}, second);
        }
        linear_terms(segments_, coef_, omegas, uniform, first);
        std::vector<double> out(omegas.size());
        for (std::size_t f = 0; f < omegas.size(); ++f) {
            const double sq = diagonal_ + 2.0 * second[f].real();
            // Nonnegative in exact arithmetic (Jensen); clip rounding residue.
            out[f] = std::max(0.0, sq - std::norm(first[f]));
        }
        return out;
    }

private:
    struct Pair {
        double lag;
        double value;
    };
    // Gauss nodes for one event's linear contribution: `panels` panels of
    // width h starting at s = a, 8 coefficients per panel from `offset`.
    struct Segment {
        double t;
        double a;
        double h;
        std::size_t panels;
        std::size_t offset;
    };

    double w(double s) const { return k_((s - center_) / scale_) / scale_; }

    void collect_breaks(double lo, double hi, std::initializer_list<double> event_times) {
        breaks_.clear();
        breaks_.push_back(lo);
        breaks_.push_back(hi);
        for (double b : wbreaks_) {
            if (b > lo && b < hi) {
                breaks_.push_back(b);
            }
        }
        for (double t : event_times) {
            for (double b : qbreaks_) {
                const double s = t - b;
                if (s > lo && s < hi) {
                    breaks_.push_back(s);
                }
            }
        }
        std::sort(breaks_.begin(), breaks_.end());
    }

    void build_pairs() {
        const double b2 = cfg_.b2;
        const double reach = qhi_ - qlo_;
        for (std::size_t j = first_; j < last_; ++j) {
            const double tj = times_[j];
            for (std::size_t l = j; l < last_ && times_[l] - tj < reach; ++l) {
                const double tl = times_[l];
                const double lo = std::max(wlo_, tl - qhi_);
                const double hi = std::min(whi_, tj - qlo_);
                if (!(hi > lo)) {
                    continue;
                }
                collect_breaks(lo, hi, {tj, tl});
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
                    acc += numeric::gauss_integrate<5>(
                        [&](double s) { return q_(b2 * (tj - s)) * q_(b2 * (tl - s)) * w(s); },
                        breaks_[i], breaks_[i + 1]);
                }
                acc *= b2;
                if (l == j) {
                    diagonal_ += acc;
                } else if (acc != 0.0) {
                    pairs_.push_back({tj - tl, acc});
                }
            }
        }
    }

    void build_segments(std::size_t from, std::size_t to, double panel, std::vector<Segment>& segs,
                        std::vector<double>& coef) {
        const auto& rule = numeric::gauss_rule<8>();
        const double root_b2 = std::sqrt(cfg_.b2);
        segs.clear();
        coef.clear();
        for (std::size_t j = from; j < to; ++j) {
            const double tj = times_[j];
            const double lo = std::max(wlo_, tj - qhi_);
            const double hi = std::min(whi_, tj - qlo_);
            if (!(hi > lo)) {
                continue;
            }
            collect_breaks(lo, hi, {tj});
            for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
                const double a = breaks_[i];
                const double b = breaks_[i + 1];
                if (!(b > a)) {
                    continue;
                }
                const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / panel)));
                const double h = (b - a) / static_cast<double>(n);
                segs.push_back({tj, a, h, n, coef.size()});
                for (std::size_t p = 0; p < n; ++p) {
                    const double mid = a + h * (static_cast<double>(p) + 0.5);
                    for (std::size_t r = 0; r < 8; ++r) {
                        const double s = mid + 0.5 * h * rule.nodes[r];
                        coef.push_back(0.5 * h * rule.weights[r] * root_b2 * q_(cfg_.b2 * (tj - s)) * w(s));
                    }
                }
            }
        }
    }

    // out[f] += sum over nodes of c e^{i omega_f (t - s)}. Phases advance by
    // recurrence across panels (and across a uniform frequency list).
    static void linear_terms(const std::vector<Segment>& segs, const std::vector<double>& coef,
                             std::span<const double> omegas, bool uniform,
                             std::vector<std::complex<double>>& out) {
        const auto& rule = numeric::gauss_rule<8>();
        const double dw = uniform ? omegas[1] - omegas[0] : 0.0;
        std::array<std::complex<double>, 8> z;
        std::array<std::complex<double>, 8> dz;
        std::array<std::complex<double>, 8> zz;
        std::array<double, 8> theta;
        for (const auto& sg : segs) {
            // theta of node r in panel p is theta[r] - h p
            for (std::size_t r = 0; r < 8; ++r) {
                theta[r] = sg.t - sg.a - 0.5 * sg.h * (1.0 + rule.nodes[r]);
            }
            std::complex<double> rot;
            std::complex<double> drot;
            if (uniform) {
                for (std::size_t r = 0; r < 8; ++r) {
                    z[r] = std::polar(1.0, omegas[0] * theta[r]);
                    dz[r] = std::polar(1.0, dw * theta[r]);
                }
                rot = std::polar(1.0, -omegas[0] * sg.h);
                drot = std::polar(1.0, -dw * sg.h);
            }
            const double* c = coef.data() + sg.offset;
            for (std::size_t f = 0; f < omegas.size(); ++f) {
                if (!uniform) {
                    for (std::size_t r = 0; r < 8; ++r) {
                        z[r] = std::polar(1.0, omegas[f] * theta[r]);
                    }
                    rot = std::polar(1.0, -omegas[f] * sg.h);
                }
                zz = z;
                std::complex<double> acc{};
                for (std::size_t p = 0; p < sg.panels; ++p) {
                    const double* cp = c + 8 * p;
                    for (std::size_t r = 0; r < 8; ++r) {
                        acc += cp[r] * zz[r];
                        zz[r] *= rot;
                    }
                }
                out[f] += acc;
                if (uniform) {
                    for (std::size_t r = 0; r < 8; ++r) {
                        z[r] *= dz[r];
                    }
                    rot *= drot;
                }
            }
        }
    }

    // Recomputes the linear contribution of a few representative events
    // (every event sees the same integrand shape up to the weight) on halved
    // panels and requires agreement.
    void check_resolution(double omega_max) {
        const double w1[] = {omega_max};
        const std::size_t picks[] = {first_, first_ + (last_ - first_) / 2, last_ - 1};
        for (std::size_t j : picks) {
            std::vector<Segment> coarse_s;
            std::vector<double> coarse_c;
            std::vector<Segment> fine_s;
            std::vector<double> fine_c;
            build_segments(j, j + 1, panel_, coarse_s, coarse_c);
            build_segments(j, j + 1, 0.5 * panel_, fine_s, fine_c);
            std::vector<std::complex<double>> a(1);
            std::vector<std::complex<double>> b(1);
            linear_terms(coarse_s, coarse_c, w1, false, a);
            linear_terms(fine_s, fine_c, w1, false, b);
            double mass = 0.0;
            for (double c : fine_c) {
                mass += std::abs(c);
            }
            if (std::abs(a[0] - b[0]) > 1e-9 * mass) {
                throw ResolutionError("linear moment not resolved at omega=" +
                                      std::to_string(omega_max));
            }
        }
    }

    const std::vector<double>& times_;
    const EstimatorConfig& cfg_;
    const TimeKernel& k_;
    const FreqKernel& q_;
    double center_ = 0.0;
    double scale_ = 1.0;
    double wlo_ = 0.0;
    double whi_ = 0.0;
    double qlo_ = 0.0;
    double qhi_ = 0.0;
    double panel_ = 1.0;
    std::vector<double> wbreaks_;
    std::vector<double> qbreaks_;
    std::size_t first_ = 0;
    std::size_t last_ = 0;
    std::vector<double> breaks_;
    double diagonal_ = 0.0;
    std::vector<Pair> pairs_;
    std::vector<Segment> segments_;
    std::vector<double> coef_;
};

} // namespace

Feasibility check_feasibility(double u0, double b1, double b2, double horizon, const TimeKernel& k,
                              const FreqKernel& q) {
    Feasibility f;
    const double tlo = u0 + b1 * k.support().lo;
    const double thi = u0 + b1 * k.support().hi;
    f.mean_density = inside_unit(tlo, thi);
    const double spread = 1.0 / (horizon * b2);
    f.bartlett = inside_unit(tlo + spread * q.support().lo, thi + spread * q.support().hi);
    return f;
}

double estimate_mean_density(const EventSeries& events, double u0, double b1, const TimeKernel& k,
                             FeasibilityMode mode) {
    if (!(b1 > 0.0 && b1 <= 1.0)) {
        throw DomainError("b1 must lie in (0, 1]");
    }
    if (!inside_unit(u0 + b1 * k.support().lo, u0 + b1 * k.support().hi)) {
        infeasible(mode, "mean density estimate infeasible at u0=" + std::to_string(u0) +
                             " b1=" + std::to_string(b1));
    }
    const double T = events.horizon();
    const double scale = T * b1;
    const double center = T * u0;
    const auto [a, b] = index_range(events.times(), center + scale * k.support().lo,
                                    center + scale * k.support().hi);
    double acc = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        acc += k((events.times()[i] - center) / scale);
    }
    return acc / scale;
}

TestFunction shifted_test_function(const ModulatedKernel& kernel, double shift) {
    TestFunction f;
    f.fn = [kernel, shift](double t) { return kernel(t - shift); };
    const auto s = kernel.support();
    f.support = {s.lo + shift, s.hi + shift};
    for (double b : kernel.breakpoints()) {
        f.breakpoints.push_back(b + shift);
    }
    f.max_frequency = std::abs(kernel.omega0());
    return f;
}

Weight as_weight(const ScaledTimeKernel& w) {
    return {[w](double t) { return w(t); }, w.support(), w.breakpoints()};
}

namespace {

std::complex<double> moment_at_resolution(const EventSeries& events, const TestFunction& f,
                                          const Weight& w, MomentKind rho, double panel) {
    const auto& t = events.times();
    std::vector<double> breaks = w.breakpoints;
    const auto [a, b] = index_range(t, w.support.lo + f.support.lo, w.support.hi + f.support.hi);
    for (std::size_t i = a; i < b; ++i) {
        for (double fb : f.breakpoints) {
            breaks.push_back(t[i] - fb);
        }
    }
    breaks = numeric::clean_breaks(std::move(breaks), w.support.lo, w.support.hi);
    if (static_cast<double>(breaks.size()) + w.support.length() / panel > kMaxPanels) {
        throw ResolutionError("empirical moment needs too many quadrature panels");
    }
    auto integrand = [&](double s) -> std::complex<double> {
        const double ws = w.fn(s);
        if (ws == 0.0) {
            return {0.0, 0.0};
        }
        const auto [lo, hi] = index_range(t, s + f.support.lo, s + f.support.hi);
        std::complex<double> sum{};
        for (std::size_t i = lo; i < hi; ++i) {
            sum += f.fn(t[i] - s);
        }
        if (rho == MomentKind::squared_modulus) {
            return {std::norm(sum) * ws, 0.0};
        }
        return sum * ws;
    };
    return numeric::composite_gauss<8>(integrand, breaks, panel);
}

} // namespace

std::complex<double> empirical_moment(const EventSeries& events, const TestFunction& f,
                                      const Weight& w, MomentKind rho, int quad_nodes,
                                      bool refinement_check) {
    if (quad_nodes < 64) {
        throw DomainError("quad_nodes must be at least 64");
    }
    double panel = w.support.length() * 8.0 / quad_nodes;
    panel = std::min(panel, f.support.length() * 8.0 / quad_nodes);
    if (f.max_frequency > 0.0) {
        panel = std::min(panel, kPi / f.max_frequency);
    }
    const auto value = moment_at_resolution(events, f, w, rho, panel);
    if (!refinement_check) {
        return value;
    }
    const auto fine = moment_at_resolution(events, f, w, rho, 0.5 * panel);
    if (std::abs(value - fine) > 1e-8 * (std::abs(fine) + 1e-12)) {
        throw ResolutionError("empirical moment changed under panel refinement");
    }
    return fine;
}

std::complex<double> convolution_moment(const EventSeries& events, const TestFunction& f,
                                        const Weight& w) {
    const auto& t = events.times();
    const auto [a, b] = index_range(t, w.support.lo + f.support.lo, w.support.hi + f.support.hi);
    const double panel = f.max_frequency > 0.0 ? kPi / f.max_frequency
                                               : std::numeric_limits<double>::infinity();
    std::complex<double> acc{};
    for (std::size_t i = a; i < b; ++i) {
        const double ti = t[i];
        // s ranges where both f(ti - s) and w(s) are nonzero
        const double lo = std::max(w.support.lo, ti - f.support.hi);
        const double hi = std::min(w.support.hi, ti - f.support.lo);
        if (!(hi > lo)) {
            continue;
        }
        std::vector<double> breaks = w.breakpoints;
        for (double fb : f.breakpoints) {
            breaks.push_back(ti - fb);
        }
        breaks = numeric::clean_breaks(std::move(breaks), lo, hi);
        acc += numeric::composite_gauss<8>(
            [&](double s) { return f.fn(ti - s) * w.fn(s); }, breaks,
            std::min(panel, hi - lo));
    }
    return acc;
}

std::vector<double> estimate_bartlett(const EventSeries& events, double u0,
                                      std::span<const double> omegas, const EstimatorConfig& cfg,
                                      const TimeKernel& k, const FreqKernel& q) {
    check_config(cfg);
    const double T = events.horizon();
    if (!check_feasibility(u0, cfg.b1, cfg.b2, T, k, q).bartlett) {
        infeasible(cfg.feasibility, "Bartlett estimate infeasible at " + describe(u0, cfg.b1, cfg.b2));
    }
    if (T * cfg.b1 * cfg.b2 < 1.0) {
        infeasible(cfg.feasibility, "T b1 b2 < 1 at " + describe(u0, cfg.b1, cfg.b2));
    }
    if (omegas.empty()) {
        return {};
    }
    double omega_max = 0.0;
    for (double w : omegas) {
        omega_max = std::max(omega_max, std::abs(w));
    }
    const LocalSpectralEngine engine(events, u0, cfg, k, q, omega_max);
    return engine.bartlett(omegas);
}

double estimate_bartlett(const EventSeries& events, double u0, double omega0,
                         const EstimatorConfig& cfg, const TimeKernel& k, const FreqKernel& q) {
    const double w[] = {omega0};
    return estimate_bartlett(events, u0, std::span<const double>(w), cfg, k, q).front();
}

// ---------------------------------------------------------------- grids

TFGrid::TFGrid(Kind k, std::vector<double> t, std::vector<double> f)
    : kind(k), times(std::move(t)), freqs(std::move(f)) {
    values.assign(times.size() * columns(), std::nullopt);
}

std::string to_string(TFGrid::Kind kind) {
    switch (kind) {
    case TFGrid::Kind::mean_density:
        return "mean-density";
    case TFGrid::Kind::bartlett:
        return "bartlett";
    case TFGrid::Kind::poisson_normalized:
        return "poisson-normalized";
    }
    return "unknown";
}

TFGrid::Kind tf_kind_from_string(const std::string& s) {
    if (s == "mean-density") {
        return TFGrid::Kind::mean_density;
    }
    if (s == "bartlett") {
        return TFGrid::Kind::bartlett;
    }
    if (s == "poisson-normalized") {
        return TFGrid::Kind::poisson_normalized;
    }
    throw ParseError("unknown grid kind \"" + s + "\"");
}

TFGrid estimate_tf_grid(const EventSeries& events, const std::vector<double>& times,
                        const std::vector<double>& freqs, const EstimatorConfig& cfg,
                        const TimeKernel& k, const FreqKernel& q) {
    check_config(cfg);
    TFGrid grid(TFGrid::Kind::bartlett, times, freqs);
    parallel_for(times.size(), [&](std::size_t i) {
        if (!check_feasibility(times[i], cfg.b1, cfg.b2, events.horizon(), k, q).bartlett) {
            return;
        }
        const auto row = estimate_bartlett(events, times[i], freqs, cfg, k, q);
        for (std::size_t j = 0; j < row.size(); ++j) {
            grid.at(i, j) = row[j];
        }
    });
    return grid;
}

TFGrid estimate_mean_density_curve(const EventSeries& events, const std::vector<double>& times,
                                   double b1, const TimeKernel& k) {
    TFGrid grid(TFGrid::Kind::mean_density, times, {});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double u = times[i];
        if (inside_unit(u + b1 * k.support().lo, u + b1 * k.support().hi)) {
            grid.at(i, 0) = estimate_mean_density(events, u, b1, k);
        }
    }
    return grid;
}

} // namespace lshawkes
