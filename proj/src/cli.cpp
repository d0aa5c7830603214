#include "lshawkes/cli.hpp"

#include "lshawkes/bandwidth.hpp"
#include "lshawkes/error.hpp"
#include "lshawkes/estimate.hpp"
#include "lshawkes/model_io.hpp"
#include "lshawkes/numeric.hpp"
#include "lshawkes/pipeline.hpp"
#include "lshawkes/simulate.hpp"
#include "lshawkes/validate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lshawkes {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

HeatmapFormat format_for(const std::string& path, const std::string& requested) {
    if (requested == "json") {
        return HeatmapFormat::json;
    }
    if (requested == "csv") {
        return HeatmapFormat::csv;
    }
    return std::filesystem::path(path).extension() == ".json" ? HeatmapFormat::json
                                                              : HeatmapFormat::csv;
}

void write_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot write " + path);
    }
    f << j.dump(2) << '\n';
    if (!f) {
        throw IoError("write failed for " + path);
    }
}

struct KernelFlags {
    std::string time_kernel = "triangle";
    std::string freq_kernel = "epanechnikov";

    void add(CLI::App* app) {
        app->add_option("--time-kernel", time_kernel, "time kernel: triangle or a CSV table (x,value)")
            ->capture_default_str();
        app->add_option("--freq-kernel", freq_kernel,
                        "frequency kernel: epanechnikov or a CSV table (x,value)")
            ->capture_default_str();
    }
};

// Bandwidth flags shared by the estimating subcommands. b2 may be given in
// rad per unit time or in Hz.
struct BandwidthFlags {
    double b1 = 0.15;
    std::optional<double> b2;
    std::optional<double> b2_hz;
    std::string mode = "fixed";
    double beta = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;

    void add(CLI::App* app, bool spectral) {
        app->add_option("--b1", b1, "time bandwidth as a fraction of the horizon")->capture_default_str();
        if (spectral) {
            app->add_option("--b2", b2, "frequency bandwidth in rad per unit time");
            app->add_option("--b2-hz", b2_hz, "frequency bandwidth in Hz (converted to rad/s)");
        }
        app->add_option("--bandwidths", mode, "fixed, or auto for the rate-optimal schedule")
            ->check(CLI::IsMember({"fixed", "auto"}))
            ->capture_default_str();
        app->add_option("--beta", beta, "smoothness exponent for --bandwidths auto")
            ->capture_default_str();
        app->add_option("--c1", c1, "constant in front of the b1 schedule")->capture_default_str();
        app->add_option("--c2", c2, "constant in front of the b2 schedule")->capture_default_str();
    }

    double b2_rad() const {
        if (b2 && b2_hz) {
            throw UsageError("give only one of --b2 and --b2-hz");
        }
        if (b2_hz) {
            return hz_to_rad(*b2_hz);
        }
        return b2.value_or(0.1);
    }

    EstimatorConfig spectral(double horizon) const {
        EstimatorConfig cfg;
        if (mode == "auto") {
            const auto plan = optimal_bandwidths(horizon, beta, c1, c2);
            cfg.b1 = plan.b1;
            cfg.b2 = plan.b2;
        } else {
            cfg.b1 = b1;
            cfg.b2 = b2_rad();
        }
        return cfg;
    }

    double density(double horizon) const {
        return mode == "auto" ? optimal_density_bandwidth(horizon, beta, c1) : b1;
    }
};

EventSeries load_events(const std::string& path, std::optional<double> horizon) {
    return read_events(path, horizon);
}

} // namespace

std::vector<double> parse_axis(const std::string& spec) {
    auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw UsageError("bad axis spec \"" + spec + "\"");
        }
        if (used != s.size()) {
            throw UsageError("bad axis spec \"" + spec + "\"");
        }
        return v;
    };
    std::vector<std::string> parts;
    const char sep = spec.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, sep)) {
        parts.push_back(p);
    }
    if (sep == ',') {
        std::vector<double> out;
        for (const auto& x : parts) {
            out.push_back(to_double(x));
        }
        if (out.empty()) {
            throw UsageError("empty axis spec");
        }
        return out;
    }
    if (parts.size() != 3) {
        throw UsageError("axis spec must be lo:hi:n, got \"" + spec + "\"");
    }
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double nd = to_double(parts[2]);
    if (!(nd >= 1.0) || nd != std::floor(nd)) {
        throw UsageError("axis point count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(nd);
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(n - 1 - i);
        const double b = static_cast<double>(i);
        out[i] = (lo * a + hi * b) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and time-frequency estimation for locally stationary Hawkes processes",
                 "lshawkes"};
    app.require_subcommand(1);
    app.fallthrough(false);

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a realization (or a day table)");
    std::string sim_model;
    double sim_horizon = 0.0;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "-";
    std::optional<double> sim_frozen;
    std::optional<double> sim_burn;
    std::size_t sim_days = 0;
    sim->add_option("--model", sim_model, "model specification JSON")->required();
    sim->add_option("--horizon", sim_horizon,
                    "horizon T in real time (session length with --days, default 30600)");
    sim->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output path, - for stdout")->capture_default_str();
    sim->add_option("--frozen-u", sim_frozen, "simulate the stationary process frozen at u");
    sim->add_option("--burn-in", sim_burn, "burn-in length before time 0");
    sim->add_option("--days", sim_days,
                    "write a day_id,time_s table of this many independent days instead");

    // theory
    auto* th = app.add_subcommand("theory", "population quantities of a model");
    std::string th_model;
    double th_u = 0.5;
    std::optional<double> th_omega;
    std::optional<double> th_omega_hz;
    std::optional<double> th_b2;
    bool th_validate = false;
    KernelFlags th_kernels;
    th->add_option("--model", th_model, "model specification JSON")->required();
    th->add_option("--u", th_u, "rescaled time in [0, 1]")->capture_default_str();
    th->add_option("--omega", th_omega, "frequency in rad per unit time");
    th->add_option("--omega-hz", th_omega_hz, "frequency in Hz");
    th->add_option("--b2", th_b2, "also print the smoothed density at this b2 (rad per unit time)");
    th->add_flag("--check", th_validate, "also run the model condition checks");
    th_kernels.add(th);

    // estimate-density
    auto* ed = app.add_subcommand("estimate-density", "local mean density estimate");
    std::string ed_events;
    std::optional<double> ed_horizon;
    double ed_u0 = 0.5;
    std::string ed_times;
    std::string ed_out;
    std::string ed_format;
    std::string ed_feas = "strict";
    BandwidthFlags ed_bw;
    KernelFlags ed_kernels;
    ed->add_option("--events", ed_events, "event file")->required();
    ed->add_option("--horizon", ed_horizon, "horizon T (default: from the event file header)");
    ed->add_option("--u0", ed_u0, "rescaled time in [0, 1]")->capture_default_str();
    ed->add_option("--times", ed_times, "time axis lo:hi:n for a curve instead of one point");
    ed->add_option("--out", ed_out, "curve output path (.csv or .json)");
    ed->add_option("--format", ed_format, "csv or json (default from extension)");
    ed->add_option("--feasibility", ed_feas, "strict or warn")
        ->check(CLI::IsMember({"strict", "warn"}))
        ->capture_default_str();
    ed_bw.add(ed, false);
    ed_kernels.add(ed);

    // estimate-spectrum
    auto* es = app.add_subcommand("estimate-spectrum", "local Bartlett spectrum estimate");
    std::string es_events;
    std::optional<double> es_horizon;
    double es_u0 = 0.5;
    std::optional<double> es_omega0;
    std::optional<double> es_omega0_hz;
    std::string es_times;
    std::string es_freqs_hz;
    std::string es_out;
    std::string es_format;
    std::string es_feas = "strict";
    int es_nodes = 64;
    BandwidthFlags es_bw;
    KernelFlags es_kernels;
    es->add_option("--events", es_events, "event file")->required();
    es->add_option("--horizon", es_horizon, "horizon T (default: from the event file header)");
    es->add_option("--u0", es_u0, "rescaled time in [0, 1]")->capture_default_str();
    es->add_option("--omega0", es_omega0, "frequency in rad per unit time");
    es->add_option("--omega0-hz", es_omega0_hz, "frequency in Hz");
    es->add_option("--times", es_times, "time axis lo:hi:n (grid mode)");
    es->add_option("--freqs-hz", es_freqs_hz, "frequency axis lo:hi:n in Hz (grid mode)");
    es->add_option("--out", es_out, "grid output path (.csv or .json)");
    es->add_option("--format", es_format, "csv or json (default from extension)");
    es->add_option("--feasibility", es_feas, "strict or warn")
        ->check(CLI::IsMember({"strict", "warn"}))
        ->capture_default_str();
    es->add_option("--quad-nodes", es_nodes, "minimum quadrature nodes per kernel support")
        ->capture_default_str();
    es_bw.add(es, true);
    es_kernels.add(es);

    // analyze
    auto* an = app.add_subcommand("analyze", "day table -> averaged and normalized heatmaps");
    std::string an_input;
    double an_session = kDefaultSession;
    std::string an_clock = "strict";
    bool an_no_jitter = false;
    std::string an_times = "0.1:0.9:17";
    std::string an_freqs = "0:0.1:21";
    std::string an_out_dir = ".";
    std::string an_format = "both";
    BandwidthFlags an_bw;
    an_bw.b2_hz = 0.005;
    KernelFlags an_kernels;
    an->add_option("--input", an_input, "CSV with columns day_id,time_s")->required();
    an->add_option("--session", an_session, "session length in seconds")->capture_default_str();
    an->add_option("--clock", an_clock, "out-of-session rows: strict (reject) or clip (drop)")
        ->check(CLI::IsMember({"strict", "clip"}))
        ->capture_default_str();
    an->add_flag("--no-jitter", an_no_jitter, "reject repeated timestamps instead of jittering");
    an->add_option("--times", an_times, "time axis lo:hi:n")->capture_default_str();
    an->add_option("--freqs-hz", an_freqs, "frequency axis lo:hi:n in Hz")->capture_default_str();
    an->add_option("--out-dir", an_out_dir, "directory for the three artifacts")
        ->capture_default_str();
    an->add_option("--format", an_format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    an_bw.add(an, true);
    an_kernels.add(an);

    // validate
    auto* va = app.add_subcommand("validate", "Monte Carlo and numeric checks of the estimators");
    std::string va_suite;
    std::string va_model;
    std::string va_out = "-";
    std::string va_target = "mean-density";
    double va_u0 = 0.5;
    double va_omega0 = 0.0;
    std::string va_horizons = "4096,8192,16384,32768,65536";
    std::size_t va_reps = 100;
    std::uint64_t va_seed = 1;
    std::string va_policy = "auto";
    std::string va_windows = "100,300,1000,3000,10000";
    std::string va_b2s = "0.4,0.2,0.1,0.05";
    BandwidthFlags va_bw;
    KernelFlags va_kernels;
    va->add_option("--suite", va_suite, "rates, devbounds or freqbias")
        ->check(CLI::IsMember({"rates", "devbounds", "freqbias"}))
        ->required();
    va->add_option("--model", va_model, "model specification JSON")->required();
    va->add_option("--out", va_out, "report path, - for stdout")->capture_default_str();
    va->add_option("--target", va_target, "rates: mean-density or bartlett")
        ->check(CLI::IsMember({"mean-density", "bartlett"}))
        ->capture_default_str();
    va->add_option("--u0", va_u0, "rescaled time in [0, 1] (devbounds: freezing time)")->capture_default_str();
    va->add_option("--omega0", va_omega0, "frequency in rad per unit time")->capture_default_str();
    va->add_option("--horizons", va_horizons, "rates: increasing horizons")->capture_default_str();
    va->add_option("--replicates", va_reps, "replicates per horizon or window")
        ->capture_default_str();
    va->add_option("--seed", va_seed, "master seed")->capture_default_str();
    va->add_option("--policy", va_policy,
                    "rates: auto (rate-optimal for the target), optimal, density-optimal or fixed")
        ->check(CLI::IsMember({"auto", "optimal", "density-optimal", "fixed"}))
        ->capture_default_str();
    va->add_option("--windows", va_windows, "devbounds: window lengths")->capture_default_str();
    va->add_option("--b2-list", va_b2s, "freqbias: frequency bandwidths")->capture_default_str();
    va_bw.add(va, true);
    va_kernels.add(va);

    std::vector<const char*> argv;
    argv.push_back("lshawkes");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*sim) {
            const auto model = load_model(sim_model);
            SimulationConfig cfg;
            cfg.seed = sim_seed;
            cfg.burn_in = sim_burn;
            if (sim_days > 0) {
                const double session = sim_horizon > 0.0 ? sim_horizon : kDefaultSession;
                EventTable table;
                table.session_length = session;
                table.days.resize(sim_days);
                parallel_for(sim_days, [&](std::size_t d) {
                    SimulationConfig dc = cfg;
                    dc.seed = derive_seed(sim_seed, d + 1);
                    table.days[d].day_id = static_cast<std::int64_t>(d + 1);
                    table.days[d].events = simulate_ls_hawkes(model, session, dc);
                });
                if (sim_out == "-") {
                    throw UsageError("--days needs an --out path");
                }
                write_event_table(sim_out, table);
                return 0;
            }
            if (!(sim_horizon > 0.0)) {
                throw UsageError("--horizon is required");
            }
            const auto events = sim_frozen ? simulate_frozen(model, *sim_frozen, sim_horizon, cfg)
                                           : simulate_ls_hawkes(model, sim_horizon, cfg);
            if (sim_out == "-") {
                write_events(out, events);
            } else {
                write_events(sim_out, events);
            }
            return 0;
        }

        if (*th) {
            const auto model = load_model(th_model);
            if (th_omega && th_omega_hz) {
                throw UsageError("give only one of --omega and --omega-hz");
            }
            const double omega = th_omega_hz ? hz_to_rad(*th_omega_hz) : th_omega.value_or(0.0);
            const auto phat = fertility_ft(model, th_u, omega);
            out << "u=" << num(th_u) << '\n';
            out << "omega=" << num(omega) << '\n';
            out << "baseline=" << num(model.baseline(th_u)) << '\n';
            out << "zeta=" << num(model.fertility.zeta(th_u)) << '\n';
            out << "m1=" << num(local_mean_density(model, th_u)) << '\n';
            out << "gamma=" << num(local_bartlett(model, th_u, omega)) << '\n';
            out << "phat_re=" << num(phat.real()) << '\n';
            out << "phat_im=" << num(phat.imag()) << '\n';
            if (th_b2) {
                const auto q = freq_kernel_by_name(th_kernels.freq_kernel);
                const double smoothed = regularized_bartlett(model, th_u, omega, *th_b2, q);
                out << "gamma_b2=" << num(smoothed) << '\n';
            }
            if (th_validate) {
                const auto report = validate_model(model);
                for (const auto& c : report.checks) {
                    out << "check " << c.name << ' ' << (c.passed ? "pass" : "fail")
                        << " measured=" << num(c.measured) << " limit=" << num(c.limit) << '\n';
                }
                out << "valid=" << (report.passed ? "true" : "false") << '\n';
            }
            return 0;
        }

        if (*ed) {
            const auto events = load_events(ed_events, ed_horizon);
            const auto k = time_kernel_by_name(ed_kernels.time_kernel);
            const double b1 = ed_bw.density(events.horizon());
            if (!ed_times.empty()) {
                const auto grid = estimate_mean_density_curve(events, parse_axis(ed_times), b1, k);
                HeatmapMetadata meta;
                meta.time_kernel = k.name();
                meta.b1 = b1;
                meta.session_length = events.horizon();
                meta.n_days = 1;
                const auto art = HeatmapArtifact::make(grid, {}, meta);
                if (ed_out.empty()) {
                    out << heatmap_to_json(art).dump(2) << '\n';
                } else {
                    export_heatmap(art, ed_out, format_for(ed_out, ed_format));
                }
                return 0;
            }
            const auto mode = ed_feas == "warn" ? FeasibilityMode::warn : FeasibilityMode::strict;
            out << "b1=" << num(b1) << '\n';
            out << "m_hat=" << num(estimate_mean_density(events, ed_u0, b1, k, mode)) << '\n';
            return 0;
        }

        if (*es) {
            const auto events = load_events(es_events, es_horizon);
            const auto k = time_kernel_by_name(es_kernels.time_kernel);
            const auto q = freq_kernel_by_name(es_kernels.freq_kernel);
            auto cfg = es_bw.spectral(events.horizon());
            cfg.quad_nodes = es_nodes;
            cfg.feasibility = es_feas == "warn" ? FeasibilityMode::warn : FeasibilityMode::strict;
            if (!es_times.empty() || !es_freqs_hz.empty()) {
                if (es_times.empty() || es_freqs_hz.empty()) {
                    throw UsageError("grid mode needs both --times and --freqs-hz");
                }
                const auto hz = parse_axis(es_freqs_hz);
                std::vector<double> rad;
                for (double f : hz) {
                    rad.push_back(hz_to_rad(f));
                }
                const auto grid = estimate_tf_grid(events, parse_axis(es_times), rad, cfg, k, q);
                HeatmapMetadata meta;
                meta.time_kernel = k.name();
                meta.freq_kernel = q.name();
                meta.b1 = cfg.b1;
                meta.b2_rad = cfg.b2;
                meta.b2_hz = rad_to_hz(cfg.b2);
                meta.session_length = events.horizon();
                meta.n_days = 1;
                const auto art = HeatmapArtifact::make(grid, hz, meta);
                if (es_out.empty()) {
                    out << heatmap_to_json(art).dump(2) << '\n';
                } else {
                    export_heatmap(art, es_out, format_for(es_out, es_format));
                }
                return 0;
            }
            if (es_omega0 && es_omega0_hz) {
                throw UsageError("give only one of --omega0 and --omega0-hz");
            }
            const double omega0 = es_omega0_hz ? hz_to_rad(*es_omega0_hz) : es_omega0.value_or(0.0);
            const double value = estimate_bartlett(events, es_u0, omega0, cfg, k, q);
            out << "b1=" << num(cfg.b1) << '\n';
            out << "b2=" << num(cfg.b2) << '\n';
            out << "omega0=" << num(omega0) << '\n';
            out << "gamma_hat=" << num(value) << '\n';
            return 0;
        }

        if (*an) {
            IngestOptions opts;
            opts.session_length = an_session;
            opts.clock = an_clock == "clip" ? ClockPolicy::clip : ClockPolicy::strict;
            opts.jitter = !an_no_jitter;
            const auto table = ingest_csv(an_input, opts);
            const auto k = time_kernel_by_name(an_kernels.time_kernel);
            const auto q = freq_kernel_by_name(an_kernels.freq_kernel);
            const auto cfg = an_bw.spectral(an_session);
            const auto result = run_analysis(table, parse_axis(an_times), parse_axis(an_freqs), cfg, k, q);
            std::filesystem::create_directories(an_out_dir);
            const std::pair<const char*, const HeatmapArtifact*> items[] = {
                {"mean_density", &result.mean_density},
                {"bartlett", &result.bartlett},
                {"poisson_normalized", &result.normalized}};
            for (const auto& [name, art] : items) {
                const auto base = std::filesystem::path(an_out_dir) / name;
                if (an_format != "json") {
                    export_heatmap(*art, base.string() + ".csv", HeatmapFormat::csv);
                }
                if (an_format != "csv") {
                    export_heatmap(*art, base.string() + ".json", HeatmapFormat::json);
                }
            }
            out << "days=" << table.days.size() << " analyzed=" << result.mean_density.meta.n_days
                << " failed=" << result.mean_density.meta.failed_days.size() << '\n';
            return 0;
        }

        if (*va) {
            const auto model = load_model(va_model);
            const auto k = time_kernel_by_name(va_kernels.time_kernel);
            const auto q = freq_kernel_by_name(va_kernels.freq_kernel);
            if (va_suite == "rates") {
                MseExperiment exp;
                exp.target = mse_target_from_string(va_target);
                exp.u0 = va_u0;
                exp.omega0 = va_omega0;
                exp.horizons = parse_axis(va_horizons);
                exp.replicates = va_reps;
                exp.master_seed = va_seed;
                exp.policy.beta = va_bw.beta;
                exp.policy.c1 = va_bw.c1;
                exp.policy.c2 = va_bw.c2;
                exp.policy.b1 = va_bw.b1;
                exp.policy.b2 = va_bw.b2_rad();
                if (va_policy == "auto") {
                    va_policy = exp.target == MseTarget::mean_density ? "density-optimal" : "optimal";
                }
                exp.policy.kind = va_policy == "fixed"             ? BandwidthPolicy::Kind::fixed
                                  : va_policy == "density-optimal" ? BandwidthPolicy::Kind::density_optimal
                                                                   : BandwidthPolicy::Kind::optimal;
                const auto report = mse_experiment(model, exp, k, q);
                auto j = to_json(report);
                const auto rates = predicted_mse_rate(model.beta);
                j["predicted_slope"] =
                    exp.target == MseTarget::mean_density ? rates.first : rates.second;
                write_json(j, va_out, out);
            } else if (va_suite == "devbounds") {
                const auto scan = variance_growth_scan(model, va_u0, parse_axis(va_windows), va_reps,
                                                       va_seed);
                write_json(to_json(scan), va_out, out);
            } else {
                const auto scan = frequency_bias_scan(model, va_u0, va_omega0, parse_axis(va_b2s), q);
                write_json(to_json(scan), va_out, out);
            }
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace lshawkes
