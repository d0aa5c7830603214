#pragma once

#include "lshawkes/estimate.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lshawkes {

inline constexpr double kDefaultSession = 30600.0;  // 9:00 to 17:30 in seconds

double hz_to_rad(double hz);
double rad_to_hz(double rad);

// What to do with timestamps outside [0, session].
enum class ClockPolicy { strict, clip };

struct IngestOptions {
    double session_length = kDefaultSession;
    ClockPolicy clock = ClockPolicy::strict;
    // Repeated timestamps within a day are moved forward by a uniform draw
    // in (0, 1e-4) s after the previous event, from a stream seeded by the
    // day id. Without jitter repeated timestamps are a ParseError.
    bool jitter = true;
};

struct DaySeries {
    std::int64_t day_id = 0;
    EventSeries events;
    std::size_t jittered = 0;
    std::size_t dropped = 0;  // out-of-session rows removed under ClockPolicy::clip
};

struct EventTable {
    double session_length = kDefaultSession;
    std::vector<DaySeries> days;  // sorted by day_id
};

// CSV with columns day_id,time_s and an optional header line.
EventTable ingest_csv(const std::string& path, const IngestOptions& opts = {});
EventTable ingest_csv(std::istream& in, const std::string& name, const IngestOptions& opts = {});
void write_event_table(const std::string& path, const EventTable& table);

struct DayAnalysis {
    std::int64_t day_id = 0;
    TFGrid mean_density;
    TFGrid bartlett;
    std::optional<std::string> failure;  // set when this day could not be estimated
};

// Mean density over `times` and Bartlett grid over times x freqs (rad) for
// every day, all with the table's session length as horizon.
std::vector<DayAnalysis> analyze_days(const EventTable& table, const std::vector<double>& times,
                                      const std::vector<double>& freqs, const EstimatorConfig& cfg,
                                      const TimeKernel& k, const FreqKernel& q);

// Pointwise mean, skipping missing cells; counts (if given) receives the
// number of contributing grids per cell.
TFGrid average_days(const std::vector<TFGrid>& grids, std::vector<std::size_t>* counts = nullptr);

// 2 pi gamma(u, omega) / m(u); DomainError where m(u) is not positive.
TFGrid poisson_normalize(const TFGrid& gamma_avg, const TFGrid& m_avg);

struct HeatmapMetadata {
    std::string time_kernel;
    std::string freq_kernel;
    double b1 = 0.0;
    double b2_hz = 0.0;
    double b2_rad = 0.0;
    double session_length = kDefaultSession;
    std::size_t n_days = 0;
    std::vector<std::int64_t> day_ids;
    std::vector<std::size_t> day_counts;  // events per day
    std::vector<std::int64_t> failed_days;

    bool operator==(const HeatmapMetadata&) const = default;
};

// A grid whose frequency axis is held in Hz; grid.freqs is always
// 2 pi * freqs_hz.
struct HeatmapArtifact {
    TFGrid grid;
    std::vector<double> freqs_hz;
    HeatmapMetadata meta;

    static HeatmapArtifact make(TFGrid grid, std::vector<double> freqs_hz, HeatmapMetadata meta);
    bool operator==(const HeatmapArtifact&) const = default;
};

enum class HeatmapFormat { csv, json };

// CSV: corner cell holds the grid kind, first row the frequencies in Hz,
// first column the rescaled times, empty cells for missing values. JSON:
// {kind, times, freqs_hz, values, metadata}. Only JSON keeps metadata.
void export_heatmap(const HeatmapArtifact& a, const std::string& path, HeatmapFormat format);
HeatmapArtifact import_heatmap(const std::string& path, HeatmapFormat format);
nlohmann::json heatmap_to_json(const HeatmapArtifact& a);
HeatmapArtifact heatmap_from_json(const nlohmann::json& j);

struct AnalysisResult {
    HeatmapArtifact mean_density;
    HeatmapArtifact bartlett;
    HeatmapArtifact normalized;
    std::vector<DayAnalysis> days;
};

// ingest result -> per-day estimates -> day averages -> Poisson normalization.
AnalysisResult run_analysis(const EventTable& table, const std::vector<double>& times,
                            const std::vector<double>& freqs_hz, const EstimatorConfig& cfg,
                            const TimeKernel& k, const FreqKernel& q);

} // namespace lshawkes
