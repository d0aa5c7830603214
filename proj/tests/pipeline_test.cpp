#include "lshawkes/error.hpp"
#include "lshawkes/numeric.hpp"
#include "lshawkes/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lshawkes;

namespace fs = std::filesystem;

namespace {

EventTable ingest(const std::string& text, const IngestOptions& opts = {}) {
    std::istringstream in(text);
    return ingest_csv(in, "test.csv", opts);
}

TFGrid grid_of(TFGrid::Kind kind, std::vector<double> times, std::vector<double> freqs,
               std::vector<std::optional<double>> values) {
    TFGrid g(kind, std::move(times), std::move(freqs));
    g.values = std::move(values);
    return g;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("lshawkes_" + name); }

} // namespace

TEST(Units, HzRadIdentity) {
    EXPECT_DOUBLE_EQ(hz_to_rad(1.0), kTwoPi);
    EXPECT_DOUBLE_EQ(rad_to_hz(kTwoPi), 1.0);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double f = 10.0 * rng.uniform();
        EXPECT_NEAR(rad_to_hz(hz_to_rad(f)), f, 1e-15 * std::max(1.0, f));
    }
}

TEST(Ingest, TwoDaysWithHeader) {
    const auto t = ingest("day_id,time_s\n2,100.5\n1,20\n1,10\n");
    ASSERT_EQ(t.days.size(), 2u);
    EXPECT_EQ(t.days[0].day_id, 1);
    EXPECT_EQ(t.days[1].day_id, 2);
    EXPECT_EQ(t.days[0].events.size(), 2u);
    EXPECT_EQ(t.days[1].events.size(), 1u);
    EXPECT_EQ(t.days[0].events.times(), (std::vector<double>{10.0, 20.0}));
    EXPECT_EQ(t.days[0].events.horizon(), kDefaultSession);
}

TEST(Ingest, StrictClockNamesTheLine) {
    try {
        ingest("1,10\n1,20\n1,40000\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("test.csv:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(ingest("1,-1\n"), ParseError);
}

TEST(Ingest, ClipPolicyDropsOutOfSession) {
    IngestOptions o;
    o.clock = ClockPolicy::clip;
    const auto t = ingest("1,10\n1,40000\n1,-3\n", o);
    ASSERT_EQ(t.days.size(), 1u);
    EXPECT_EQ(t.days[0].events.size(), 1u);
    EXPECT_EQ(t.days[0].dropped, 2u);
}

TEST(Ingest, MalformedRows) {
    EXPECT_THROW(ingest("1,10\nx,20\n"), ParseError);
    EXPECT_THROW(ingest("1,10,3\n"), ParseError);
    EXPECT_THROW(ingest("1,nan\n"), ParseError);
}

TEST(Ingest, DuplicateTimestampsAreJittered) {
    const auto a = ingest("1,10\n1,10\n1,10\n1,11\n");
    const auto& ev = a.days[0].events.times();
    ASSERT_EQ(ev.size(), 4u);
    EXPECT_EQ(a.days[0].jittered, 2u);
    EXPECT_EQ(ev[0], 10.0);
    EXPECT_GT(ev[1], 10.0);
    EXPECT_LT(ev[1], 10.0 + 1e-4);
    EXPECT_GT(ev[2], ev[1]);
    EXPECT_LT(ev[2], ev[1] + 1e-4);
    // same day id, same jitter
    EXPECT_EQ(ingest("1,10\n1,10\n1,10\n1,11\n").days[0].events, a.days[0].events);
    IngestOptions o;
    o.jitter = false;
    EXPECT_THROW(ingest("1,10\n1,10\n", o), ParseError);
}

TEST(Ingest, FileRoundTrip) {
    const auto t = ingest("1,10\n1,20\n3,5.25\n");
    const auto path = scratch("table.csv");
    write_event_table(path.string(), t);
    const auto back = ingest_csv(path.string());
    ASSERT_EQ(back.days.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.days[i].day_id, t.days[i].day_id);
        EXPECT_EQ(back.days[i].events, t.days[i].events);
    }
    fs::remove(path);
    EXPECT_THROW(ingest_csv("/nonexistent/table.csv"), IoError);
}

TEST(AverageDays, SkipsMissingCells) {
    const auto a = grid_of(TFGrid::Kind::bartlett, {0.5}, {0.0, 1.0}, {1.0, std::nullopt});
    const auto b = grid_of(TFGrid::Kind::bartlett, {0.5}, {0.0, 1.0}, {3.0, 4.0});
    std::vector<std::size_t> counts;
    const auto avg = average_days({a, b}, &counts);
    EXPECT_EQ(*avg.at(0, 0), 2.0);
    EXPECT_EQ(*avg.at(0, 1), 4.0);
    EXPECT_EQ(counts, (std::vector<std::size_t>{2, 1}));
    const auto c = grid_of(TFGrid::Kind::bartlett, {0.5}, {0.0, 1.0}, {std::nullopt, std::nullopt});
    EXPECT_FALSE(average_days({c, c}).at(0, 0).has_value());
    const auto d = grid_of(TFGrid::Kind::bartlett, {0.4}, {0.0, 1.0}, {1.0, 1.0});
    EXPECT_THROW(average_days({a, d}), DomainError);
}

TEST(PoissonNormalize, Examples) {
    const auto g = grid_of(TFGrid::Kind::bartlett, {0.3, 0.6}, {0.0, 1.0},
                           {1.0 / kTwoPi, 2.0 / kTwoPi, std::nullopt, 1.0});
    const auto m = grid_of(TFGrid::Kind::mean_density, {0.3, 0.6}, {}, {1.0, 2.0});
    const auto n = poisson_normalize(g, m);
    EXPECT_EQ(n.kind, TFGrid::Kind::poisson_normalized);
    EXPECT_NEAR(*n.at(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(*n.at(0, 1), 2.0, 1e-15);
    EXPECT_FALSE(n.at(1, 0).has_value());
    EXPECT_NEAR(*n.at(1, 1), kPi, 1e-15);
    const auto zero = grid_of(TFGrid::Kind::mean_density, {0.3, 0.6}, {}, {0.0, 2.0});
    EXPECT_THROW(poisson_normalize(g, zero), DomainError);
}

TEST(Heatmap, CsvLayoutAndRoundTrip) {
    const auto g = grid_of(TFGrid::Kind::bartlett, {0.25, 0.75}, {}, {0.125, std::nullopt, 1.0 / 3.0, 2.0});
    HeatmapMetadata meta;
    meta.b2_hz = 0.005;
    meta.b2_rad = hz_to_rad(0.005);
    const auto a = HeatmapArtifact::make(g, {0.0, 0.05}, meta);
    EXPECT_NEAR(a.grid.freqs[1], hz_to_rad(0.05), 1e-17);
    const auto path = scratch("heat.csv");
    export_heatmap(a, path.string(), HeatmapFormat::csv);
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) {
        lines.push_back(l);
    }
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "bartlett,0,0.050000000000000003");
    EXPECT_EQ(lines[1], "0.25,0.125,");
    const auto back = import_heatmap(path.string(), HeatmapFormat::csv);
    EXPECT_EQ(back.grid, a.grid);
    EXPECT_EQ(back.freqs_hz, a.freqs_hz);
    fs::remove(path);
}

TEST(Heatmap, MeanDensityCsvHasValueColumn) {
    const auto g = grid_of(TFGrid::Kind::mean_density, {0.25, 0.75}, {}, {1.5, std::nullopt});
    const auto a = HeatmapArtifact::make(g, {}, {});
    const auto path = scratch("density.csv");
    export_heatmap(a, path.string(), HeatmapFormat::csv);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "mean-density,value");
    EXPECT_EQ(import_heatmap(path.string(), HeatmapFormat::csv).grid, a.grid);
    fs::remove(path);
}

TEST(Heatmap, JsonRoundTripKeepsMetadata) {
    const auto g = grid_of(TFGrid::Kind::poisson_normalized, {0.5}, {}, {1.25, std::nullopt, 0.1 + 0.2});
    HeatmapMetadata meta;
    meta.time_kernel = "triangle";
    meta.freq_kernel = "epanechnikov";
    meta.b1 = 0.1;
    meta.b2_hz = 0.005;
    meta.b2_rad = hz_to_rad(0.005);
    meta.n_days = 2;
    meta.day_ids = {3, 4};
    meta.day_counts = {100, 120};
    meta.failed_days = {5};
    const auto a = HeatmapArtifact::make(g, {0.0, 0.01, 0.02}, meta);
    EXPECT_EQ(heatmap_from_json(heatmap_to_json(a)), a);
    const auto path = scratch("heat.json");
    export_heatmap(a, path.string(), HeatmapFormat::json);
    EXPECT_EQ(import_heatmap(path.string(), HeatmapFormat::json), a);
    fs::remove(path);
    EXPECT_THROW(heatmap_from_json(nlohmann::json{{"kind", "bartlett"}}), ParseError);
}

TEST(RunAnalysis, SimulatedPoissonDaysNormalizeToOne) {
    EventTable t;
    t.session_length = 5000.0;
    Rng rng(4);
    for (int d = 1; d <= 3; ++d) {
        std::vector<double> ev;
        double x = 0.0;
        while ((x += rng.exponential(0.5)) < t.session_length) {
            ev.push_back(x);
        }
        t.days.push_back({d, EventSeries(ev, t.session_length), 0, 0});
    }
    EstimatorConfig cfg;
    cfg.b1 = 0.2;
    cfg.b2 = hz_to_rad(0.01);
    const auto r = run_analysis(t, {0.3, 0.5, 0.7}, {0.0, 0.05}, cfg, triangle_kernel(), epanechnikov_kernel());
    EXPECT_EQ(r.normalized.meta.n_days, 3u);
    EXPECT_NEAR(r.bartlett.meta.b2_hz, 0.01, 1e-15);
    EXPECT_EQ(r.normalized.grid.times.size(), 3u);
    for (const auto& v : r.normalized.grid.values) {
        ASSERT_TRUE(v.has_value());
        EXPECT_NEAR(*v, 1.0, 0.35);
    }
    for (const auto& v : r.mean_density.grid.values) {
        EXPECT_NEAR(*v, 0.5, 0.1);
    }
}
