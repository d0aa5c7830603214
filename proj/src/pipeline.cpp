#include "lshawkes/pipeline.hpp"

#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace lshawkes {

double hz_to_rad(double hz) { return kTwoPi * hz; }
double rad_to_hz(double rad) { return rad / kTwoPi; }

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
    if (s.empty()) {
        return false;
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

EventTable ingest_csv(std::istream& in, const std::string& name, const IngestOptions& opts) {
    if (!(opts.session_length >= 1.0)) {
        throw DomainError("session length must be >= 1");
    }
    std::map<std::int64_t, std::vector<double>> raw;
    std::map<std::int64_t, std::size_t> dropped;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto cells = split_csv(t);
        std::int64_t day = 0;
        double time = 0.0;
        const bool ok = cells.size() == 2 && parse_number(cells[0], day) && parse_number(cells[1], time);
        if (!ok) {
            if (!seen_data && cells.size() == 2 && !parse_number(cells[0], day)) {
                seen_data = true;  // header
                continue;
            }
            throw ParseError(name + ":" + std::to_string(line_no) + ": expected day_id,time_s");
        }
        seen_data = true;
        if (!std::isfinite(time)) {
            throw ParseError(name + ":" + std::to_string(line_no) + ": non-finite time");
        }
        if (time < 0.0 || time > opts.session_length) {
            if (opts.clock == ClockPolicy::strict) {
                throw ParseError(name + ":" + std::to_string(line_no) + ": time " + cells[1] +
                                 " outside session [0, " + format_double(opts.session_length) + "]");
            }
            ++dropped[day];
            raw[day];
            continue;
        }
        raw[day].push_back(time);
    }

    EventTable table;
    table.session_length = opts.session_length;
    for (auto& [day, times] : raw) {
        std::sort(times.begin(), times.end());
        DaySeries ds;
        ds.day_id = day;
        ds.dropped = dropped.count(day) ? dropped[day] : 0;
        Rng rng(derive_seed(0x6a177e5ULL, static_cast<std::uint64_t>(day)));
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i] > times[i - 1]) {
                continue;
            }
            if (!opts.jitter) {
                throw ParseError(name + ": day " + std::to_string(day) + " repeats timestamp " +
                                 format_double(times[i]));
            }
            times[i] = times[i - 1] + 1e-4 * rng.uniform();
            if (times[i] > opts.session_length) {
                throw ParseError(name + ": day " + std::to_string(day) +
                                 " has repeated timestamps at the session end");
            }
            ++ds.jittered;
        }
        if (times.empty()) {
            std::clog << "warning: " << name << ": day " << day << " has no events in session\n";
        }
        ds.events = EventSeries(std::move(times), opts.session_length);
        table.days.push_back(std::move(ds));
    }
    if (table.days.empty()) {
        std::clog << "warning: " << name << ": no events\n";
    }
    return table;
}

EventTable ingest_csv(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return ingest_csv(in, path, opts);
}

void write_event_table(const std::string& path, const EventTable& table) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << "day_id,time_s\n";
    for (const auto& d : table.days) {
        for (double t : d.events.times()) {
            out << d.day_id << ',' << format_double(t) << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

std::vector<DayAnalysis> analyze_days(const EventTable& table, const std::vector<double>& times,
                                      const std::vector<double>& freqs, const EstimatorConfig& cfg,
                                      const TimeKernel& k, const FreqKernel& q) {
    std::vector<DayAnalysis> out(table.days.size());
    parallel_for(table.days.size(), [&](std::size_t i) {
        const auto& day = table.days[i];
        auto& r = out[i];
        r.day_id = day.day_id;
        r.mean_density = TFGrid(TFGrid::Kind::mean_density, times, {});
        r.bartlett = TFGrid(TFGrid::Kind::bartlett, times, freqs);
        try {
            r.mean_density = estimate_mean_density_curve(day.events, times, cfg.b1, k);
            r.bartlett = estimate_tf_grid(day.events, times, freqs, cfg, k, q);
        } catch (const Error& e) {
            r.failure = e.what();
            r.mean_density = TFGrid(TFGrid::Kind::mean_density, times, {});
            r.bartlett = TFGrid(TFGrid::Kind::bartlett, times, freqs);
        }
    });
    return out;
}

TFGrid average_days(const std::vector<TFGrid>& grids, std::vector<std::size_t>* counts) {
    if (grids.empty()) {
        throw DomainError("nothing to average");
    }
    const auto& first = grids.front();
    for (const auto& g : grids) {
        if (g.times != first.times || g.freqs != first.freqs || g.kind != first.kind) {
            throw DomainError("averaged grids must share kind and axes");
        }
    }
    TFGrid avg(first.kind, first.times, first.freqs);
    std::vector<std::size_t> n(avg.values.size(), 0);
    for (std::size_t c = 0; c < avg.values.size(); ++c) {
        double sum = 0.0;
        for (const auto& g : grids) {
            if (g.values[c]) {
                sum += *g.values[c];
                ++n[c];
            }
        }
        if (n[c] > 0) {
            avg.values[c] = sum / static_cast<double>(n[c]);
        }
    }
    if (counts) {
        *counts = std::move(n);
    }
    return avg;
}

TFGrid poisson_normalize(const TFGrid& gamma_avg, const TFGrid& m_avg) {
    if (gamma_avg.times != m_avg.times || m_avg.columns() != 1) {
        throw DomainError("mean density curve must share the grid's time axis");
    }
    constexpr double tiny = 1e-12;
    TFGrid out(TFGrid::Kind::poisson_normalized, gamma_avg.times, gamma_avg.freqs);
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        const auto& m = m_avg.at(i, 0);
        for (std::size_t j = 0; j < out.columns(); ++j) {
            const auto& g = gamma_avg.at(i, j);
            if (!g) {
                continue;
            }
            if (!m || !(*m > tiny)) {
                throw DomainError("mean density not positive at u=" + format_double(out.times[i]));
            }
            out.at(i, j) = kTwoPi * *g / *m;
        }
    }
    return out;
}

HeatmapArtifact HeatmapArtifact::make(TFGrid grid, std::vector<double> freqs_hz, HeatmapMetadata meta) {
    HeatmapArtifact a;
    grid.freqs.clear();
    for (double f : freqs_hz) {
        grid.freqs.push_back(hz_to_rad(f));
    }
    const auto cols = grid.columns();
    if (grid.values.size() != grid.times.size() * cols) {
        throw DomainError("grid values do not match its axes");
    }
    a.grid = std::move(grid);
    a.freqs_hz = std::move(freqs_hz);
    a.meta = std::move(meta);
    return a;
}

nlohmann::json heatmap_to_json(const HeatmapArtifact& a) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < a.grid.times.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < a.grid.columns(); ++j) {
            const auto& v = a.grid.at(i, j);
            row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        }
        values.push_back(std::move(row));
    }
    const auto& m = a.meta;
    return {{"kind", to_string(a.grid.kind)},
            {"times", a.grid.times},
            {"freqs_hz", a.freqs_hz},
            {"values", values},
            {"metadata",
             {{"time_kernel", m.time_kernel},
              {"freq_kernel", m.freq_kernel},
              {"b1", m.b1},
              {"b2_hz", m.b2_hz},
              {"b2_rad", m.b2_rad},
              {"session_length", m.session_length},
              {"n_days", m.n_days},
              {"day_ids", m.day_ids},
              {"day_counts", m.day_counts},
              {"failed_days", m.failed_days}}}};
}

HeatmapArtifact heatmap_from_json(const nlohmann::json& j) {
    try {
        const auto kind = tf_kind_from_string(j.at("kind").get<std::string>());
        auto times = j.at("times").get<std::vector<double>>();
        auto hz = j.at("freqs_hz").get<std::vector<double>>();
        TFGrid grid(kind, times, {});
        grid.freqs.resize(hz.size());
        grid.values.assign(times.size() * grid.columns(), std::nullopt);
        const auto& rows = j.at("values");
        if (rows.size() != times.size()) {
            throw ParseError("heatmap rows do not match the time axis");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != grid.columns()) {
                throw ParseError("heatmap row " + std::to_string(i) + " has the wrong length");
            }
            for (std::size_t c = 0; c < rows[i].size(); ++c) {
                if (!rows[i][c].is_null()) {
                    grid.at(i, c) = rows[i][c].get<double>();
                }
            }
        }
        HeatmapMetadata m;
        if (j.contains("metadata")) {
            const auto& md = j.at("metadata");
            m.time_kernel = md.value("time_kernel", "");
            m.freq_kernel = md.value("freq_kernel", "");
            m.b1 = md.value("b1", 0.0);
            m.b2_hz = md.value("b2_hz", 0.0);
            m.b2_rad = md.value("b2_rad", 0.0);
            m.session_length = md.value("session_length", kDefaultSession);
            m.n_days = md.value("n_days", std::size_t{0});
            m.day_ids = md.value("day_ids", std::vector<std::int64_t>{});
            m.day_counts = md.value("day_counts", std::vector<std::size_t>{});
            m.failed_days = md.value("failed_days", std::vector<std::int64_t>{});
        }
        return HeatmapArtifact::make(std::move(grid), std::move(hz), std::move(m));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed heatmap JSON: ") + e.what());
    }
}

void export_heatmap(const HeatmapArtifact& a, const std::string& path, HeatmapFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    if (format == HeatmapFormat::json) {
        out << heatmap_to_json(a).dump(2) << '\n';
    } else {
        const bool density = a.grid.kind == TFGrid::Kind::mean_density;
        out << to_string(a.grid.kind);
        if (density) {
            out << ",value";
        }
        for (double f : a.freqs_hz) {
            out << ',' << format_double(f);
        }
        out << '\n';
        for (std::size_t i = 0; i < a.grid.times.size(); ++i) {
            out << format_double(a.grid.times[i]);
            for (std::size_t j = 0; j < a.grid.columns(); ++j) {
                out << ',';
                if (const auto& v = a.grid.at(i, j)) {
                    out << format_double(*v);
                }
            }
            out << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

HeatmapArtifact import_heatmap(const std::string& path, HeatmapFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    if (format == HeatmapFormat::json) {
        try {
            return heatmap_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path + ": empty heatmap file");
    }
    const auto header = split_csv(trim(line));
    const auto kind = tf_kind_from_string(header.at(0));
    const bool density = kind == TFGrid::Kind::mean_density;
    std::vector<double> hz;
    for (std::size_t c = density ? 2 : 1; c < header.size(); ++c) {
        double f = 0.0;
        if (!parse_number(header[c], f)) {
            throw ParseError(path + ":1: bad frequency \"" + header[c] + "\"");
        }
        hz.push_back(f);
    }
    const std::size_t cols = density ? 1 : hz.size();
    std::vector<double> times;
    std::vector<std::optional<double>> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != cols + 1) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(cols + 1) + " cells");
        }
        double u = 0.0;
        if (!parse_number(cells[0], u)) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad time");
        }
        times.push_back(u);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                values.emplace_back();
                continue;
            }
            double v = 0.0;
            if (!parse_number(cells[c], v)) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad value");
            }
            values.emplace_back(v);
        }
    }
    TFGrid grid(kind, times, {});
    grid.values = std::move(values);
    if (!density) {
        grid.freqs.resize(hz.size());
    }
    return HeatmapArtifact::make(std::move(grid), std::move(hz), {});
}

AnalysisResult run_analysis(const EventTable& table, const std::vector<double>& times,
                            const std::vector<double>& freqs_hz, const EstimatorConfig& cfg,
                            const TimeKernel& k, const FreqKernel& q) {
    if (table.days.empty()) {
        throw InsufficientData("event table has no days");
    }
    std::vector<double> freqs;
    for (double f : freqs_hz) {
        freqs.push_back(hz_to_rad(f));
    }
    AnalysisResult r;
    r.days = analyze_days(table, times, freqs, cfg, k, q);

    HeatmapMetadata meta;
    meta.time_kernel = k.name();
    meta.freq_kernel = q.name();
    meta.b1 = cfg.b1;
    meta.b2_rad = cfg.b2;
    meta.b2_hz = rad_to_hz(cfg.b2);
    meta.session_length = table.session_length;
    std::vector<TFGrid> densities;
    std::vector<TFGrid> spectra;
    for (std::size_t i = 0; i < r.days.size(); ++i) {
        meta.day_ids.push_back(table.days[i].day_id);
        meta.day_counts.push_back(table.days[i].events.size());
        if (r.days[i].failure) {
            meta.failed_days.push_back(r.days[i].day_id);
            std::clog << "warning: day " << r.days[i].day_id << ": " << *r.days[i].failure << '\n';
            continue;
        }
        densities.push_back(r.days[i].mean_density);
        spectra.push_back(r.days[i].bartlett);
    }
    meta.n_days = densities.size();
    if (densities.empty()) {
        throw InsufficientData("every day failed to estimate");
    }
    const auto m_avg = average_days(densities);
    const auto g_avg = average_days(spectra);
    const auto normalized = poisson_normalize(g_avg, m_avg);
    r.mean_density = HeatmapArtifact::make(m_avg, {}, meta);
    r.bartlett = HeatmapArtifact::make(g_avg, freqs_hz, meta);
    r.normalized = HeatmapArtifact::make(normalized, freqs_hz, meta);
    return r;
}

} // namespace lshawkes
