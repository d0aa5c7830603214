#include "lshawkes/simulate.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lshawkes {

EventSeries::EventSeries(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (!(horizon_ >= 1.0) || !std::isfinite(horizon_)) {
        throw DomainError("event series horizon must be finite and >= 1");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!(t >= 0.0 && t <= horizon_)) {
            throw DomainError("event time " + std::to_string(t) + " outside [0, T]");
        }
        if (i > 0 && !(t > times_[i - 1])) {
            throw DomainError("event times must be strictly increasing");
        }
    }
}

double default_burn_in(const LsHawkesModel& model) {
    const auto& f = model.fertility;
    const double zeta_sup =
        f.kind() == FertilityFamily::Kind::zero ? 0.0 : std::clamp(f.zeta_curve().max_value(), 0.0, 0.99);
    return 5.0 / (f.tail_rate() * (1.0 - zeta_sup));
}

double conditional_intensity(const LsHawkesModel& model, double horizon,
                             std::span<const double> history, double t, double history_epsilon) {
    const double u = t / horizon;
    const double reach = model.fertility.truncation_horizon(history_epsilon);
    double lambda = model.baseline(u);
    for (double ti : history) {
        if (!(ti < t)) {
            throw DomainError("history must precede the evaluation time");
        }
        if (t - ti <= reach) {
            lambda += model.fertility.density(t - ti, u);
        }
    }
    return lambda;
}

namespace {

// Self-excitation bookkeeping for thinning. The generic version keeps the
// truncated history; exponential fertility with constant decay keeps the
// exact running sum instead.
class Excitation {
public:
    Excitation(const FertilityFamily& f, double eps)
        : f_(f), reach_(f.truncation_horizon(eps)) {
        fast_ = f.kind() == FertilityFamily::Kind::exponential && f.decay_curve().is_constant();
        if (fast_) {
            decay_ = f.decay_curve()(0.0);
            zeta_max_ = std::max(0.0, f.zeta_curve().max_value());
        }
        active_ = f.kind() != FertilityFamily::Kind::zero && f.majorant(0.0) > 0.0;
    }

    // Upper bound on the excitation at every time >= t.
    double bound(double t) {
        if (!active_) {
            return 0.0;
        }
        if (fast_) {
            return zeta_max_ * decay_ * decayed(t);
        }
        while (!history_.empty() && t - history_.front() > reach_) {
            history_.pop_front();
        }
        double m = 0.0;
        for (double ti : history_) {
            m += f_.majorant(t - ti);
        }
        return m;
    }

    double value(double t, double u) const {
        if (!active_) {
            return 0.0;
        }
        if (fast_) {
            return f_.zeta(u) * decay_ * decayed(t);
        }
        double v = 0.0;
        for (double ti : history_) {
            if (t - ti <= reach_) {
                v += f_.density(t - ti, u);
            }
        }
        return v;
    }

    void accept(double t) {
        if (!active_) {
            return;
        }
        if (fast_) {
            sum_ = decayed(t) + 1.0;
            ref_ = t;
            return;
        }
        history_.push_back(t);
    }

private:
    double decayed(double t) const { return sum_ * std::exp(-decay_ * (t - ref_)); }

    const FertilityFamily& f_;
    double reach_;
    bool active_ = false;
    bool fast_ = false;
    double decay_ = 0.0;
    double zeta_max_ = 0.0;
    double sum_ = 0.0;
    double ref_ = 0.0;
    std::deque<double> history_;
};

void require_subcritical(const LsHawkesModel& model) {
    const auto& f = model.fertility;
    if (f.kind() != FertilityFamily::Kind::zero && !(f.zeta_curve().max_value() < 1.0)) {
        throw InvalidModel("cannot simulate: sup zeta >= 1");
    }
    if (model.baseline.curve.min_value() < 0.0) {
        throw InvalidModel("cannot simulate: negative baseline");
    }
}

// Thinning on [start, end], keeping events in [keep_from, end].
std::vector<double> thin(const LsHawkesModel& model, double horizon, double start, double keep_from,
                         double end, const SimulationConfig& cfg) {
    require_subcritical(model);
    Rng rng(cfg.seed);
    Excitation exc(model.fertility, cfg.history_epsilon);
    const double base_max = std::max(0.0, model.baseline.curve.max_value());
    std::vector<double> kept;
    std::size_t accepted = 0;
    double t = start;
    for (;;) {
        const double bound = base_max + exc.bound(t);
        if (!(bound > 0.0)) {
            break;
        }
        t += rng.exponential(bound);
        if (t > end) {
            break;
        }
        const double u = t / horizon;
        const double lambda = model.baseline(u) + exc.value(t, u);
        if (lambda > bound * (1.0 + 1e-9)) {
            throw Error("thinning bound violated: intensity " + std::to_string(lambda) +
                        " exceeds bound " + std::to_string(bound));
        }
        if (rng.uniform() * bound <= lambda) {
            exc.accept(t);
            if (++accepted > cfg.max_events) {
                throw ExplosionGuard("simulation exceeded max_events=" +
                                     std::to_string(cfg.max_events));
            }
            if (t >= keep_from && (kept.empty() || t > kept.back())) {
                kept.push_back(t);
            }
        }
    }
    return kept;
}

} // namespace

EventSeries simulate_ls_hawkes(const LsHawkesModel& model, double horizon,
                               const SimulationConfig& cfg) {
    return simulate_ls_hawkes_window(model, horizon, 0.0, horizon, cfg);
}

EventSeries simulate_ls_hawkes_window(const LsHawkesModel& model, double horizon, double lo,
                                      double hi, const SimulationConfig& cfg) {
    if (!(horizon >= 1.0)) {
        throw DomainError("simulation horizon must be >= 1");
    }
    if (!(lo >= 0.0 && hi <= horizon && lo <= hi)) {
        throw DomainError("simulation window must lie inside [0, T]");
    }
    const double burn = cfg.burn_in.value_or(default_burn_in(model));
    EventSeries s(thin(model, horizon, lo - burn, lo, hi, cfg), horizon);
    s.seed = cfg.seed;
    return s;
}

EventSeries simulate_frozen(const LsHawkesModel& model, double u, double duration,
                            const SimulationConfig& cfg) {
    const auto frozen = model.frozen_at(u);
    return simulate_ls_hawkes(frozen, duration, cfg);
}

void write_events(std::ostream& out, const EventSeries& series) {
    out << "# horizon=" << std::setprecision(17) << series.horizon();
    if (series.seed) {
        out << " seed=" << *series.seed;
    }
    out << '\n';
    for (double t : series.times()) {
        out << t << '\n';
    }
}

void write_events(const std::string& path, const EventSeries& series) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_events(out, series);
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

EventSeries read_events(const std::string& path, std::optional<double> horizon) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open event file " + path);
    }
    std::vector<double> times;
    std::optional<double> header_horizon;
    std::optional<std::uint64_t> seed;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                if (tok.rfind("horizon=", 0) == 0) {
                    header_horizon = std::stod(tok.substr(8));
                } else if (tok.rfind("seed=", 0) == 0) {
                    seed = std::stoull(tok.substr(5));
                }
            }
            continue;
        }
        std::size_t used = 0;
        double t = 0.0;
        try {
            t = std::stod(line, &used);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": not a number");
        }
        if (line.find_first_not_of(" \t\r", used) != std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": trailing characters");
        }
        times.push_back(t);
    }
    const auto T = horizon ? horizon : header_horizon;
    if (!T) {
        throw ParseError(path + ": no horizon given and none in the header");
    }
    EventSeries s(std::move(times), *T);
    s.seed = seed;
    return s;
}

} // namespace lshawkes
