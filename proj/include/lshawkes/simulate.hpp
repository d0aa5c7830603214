#pragma once

#include "lshawkes/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lshawkes {

// Sorted event times of one realization observed on [0, horizon].
class EventSeries {
public:
    EventSeries() = default;
    // Throws DomainError unless times are strictly increasing inside
    // [0, horizon] and horizon >= 1.
    EventSeries(std::vector<double> times, double horizon);

    const std::vector<double>& times() const { return times_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    // Seed recorded by the simulator, if any.
    std::optional<std::uint64_t> seed;

    bool operator==(const EventSeries& other) const {
        return horizon_ == other.horizon_ && times_ == other.times_;
    }

private:
    std::vector<double> times_;
    double horizon_ = 1.0;
};

struct SimulationConfig {
    std::uint64_t seed = 0;
    // Length of the warm-up stretch before the kept window; defaults to
    // 5 / (d (1 - sup zeta)) with d the envelope decay rate.
    std::optional<double> burn_in;
    // History terms whose envelope falls below this are dropped.
    double history_epsilon = 1e-12;
    std::size_t max_events = 50'000'000;
};

double default_burn_in(const LsHawkesModel& model);

// lambda_c(t/T) + sum_{t_i < t} p(t - t_i; t/T), ignoring history older than
// the epsilon truncation horizon.
double conditional_intensity(const LsHawkesModel& model, double horizon,
                             std::span<const double> history, double t,
                             double history_epsilon = 1e-12);

// Ogata thinning on [-burn_in, T]; returns the events in [0, T].
EventSeries simulate_ls_hawkes(const LsHawkesModel& model, double horizon,
                               const SimulationConfig& cfg);

// Same process, but only the stretch [lo, hi] of [0, T] is generated (with
// its own burn-in before lo). Used where only a local window is observed.
EventSeries simulate_ls_hawkes_window(const LsHawkesModel& model, double horizon, double lo,
                                      double hi, const SimulationConfig& cfg);

// The stationary process N(.; u) on [0, duration].
EventSeries simulate_frozen(const LsHawkesModel& model, double u, double duration,
                            const SimulationConfig& cfg);

// One event time per line, preceded by "# horizon=<T> seed=<seed>".
void write_events(std::ostream& out, const EventSeries& series);
void write_events(const std::string& path, const EventSeries& series);
// The horizon comes from the header unless given explicitly.
EventSeries read_events(const std::string& path, std::optional<double> horizon = std::nullopt);

} // namespace lshawkes
