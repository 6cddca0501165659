#include "sosim/cli.hpp"

#include "sosim/model_json.hpp"
#include "sosim/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace sosim {

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct Flags {
    std::string trace;
    std::string synth_config;
    std::vector<std::string> sensors;
    std::vector<std::string> actions;
    std::size_t window_seconds = 1800;
    std::string profile;
    bool paper_mode = false;
    double train_days = 7.0;
    std::string out;
    std::string models_out;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    std::uint64_t events_per_day = 1795;
    std::uint64_t actions_per_day = 7;
    Tick slack = 60;
    bool strict_ticks = false;
    bool naive_buffer = false;
    bool naive_algorithm = false;
    bool json = false;
};

EnergyProfiles resolve_profiles(const std::string& flag) {
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("SOSIM_PROFILE")) path = env;
    return path.empty() ? EnergyProfiles{} : load_profiles(path);
}

// Writes to --out when given, otherwise to `fallback`.
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& write) {
    if (path.empty() || path == "-") {
        write(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoFailure("cannot open '" + path + "' for writing");
    write(file);
    if (!file) throw IoFailure("write to '" + path + "' failed");
}

void report_diagnostics(const LoadResult& loaded, std::ostream& err) {
    for (const auto& d : loaded.diagnostics) {
        err << "warning: ";
        if (d.line) err << "line " << d.line << ": ";
        err << d.message << '\n';
    }
}

void require_sensors(const Flags& f) {
    if (f.sensors.empty()) throw UsageError("--sensors must name at least one sensor");
}

int cmd_stats(const Flags& f, std::ostream& out, std::ostream& err) {
    require_sensors(f);
    const auto loaded = load_trace_file(f.trace);
    report_diagnostics(loaded, err);
    const auto& log = loaded.log;
    const auto subset = resolve_subset(log, f.sensors);
    const auto rate = daily_event_rate(log, subset);
    const auto hist = hourly_histogram(log, subset);

    std::size_t annotation_lines = 0;
    for (const auto& r : log.records) annotation_lines += r.annotation ? 1 : 0;

    out << std::setprecision(10);
    out << "records: " << log.records.size() << '\n'
        << "malformed_lines: " << loaded.malformed_lines << '\n'
        << "sensors: " << log.sensor_names.size() << '\n'
        << "span_days: " << log.span_days() << '\n'
        << "annotation_markers: " << annotation_lines << '\n'
        << "annotated_actions: " << loaded.intervals.size() << '\n'
        << "subset_events: " << rate.events << '\n'
        << "subset_events_per_day: " << rate.per_day() << '\n'
        << "histogram_days: " << hist.days << '\n'
        << "hour,mean_events_per_day\n";
    for (std::size_t h = 0; h < 24; ++h) out << h << ',' << hist.mean(h) << '\n';
    return kExitOk;
}

int cmd_synth(const Flags& f, std::ostream& out, std::ostream&) {
    auto config = load_synthetic_config(f.synth_config);
    if (f.seed) config.seed = *f.seed;
    const auto trace = generate_synthetic(config);
    with_output(f.out, out, [&](std::ostream& o) { write_trace(o, trace.log); });
    return kExitOk;
}

nlohmann::json profiles_json(const EnergyProfiles& p) { return nlohmann::json::parse(profiles_to_json_text(p)); }

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
    if (!f.trace.empty() && !f.synth_config.empty()) throw UsageError("--trace and --synth-config are exclusive");
    if (f.format != "json" && f.format != "csv") throw UsageError("--format must be json or csv");
    if (f.window_seconds == 0) throw UsageError("--window-seconds must be positive");
    const auto format = f.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
    const auto profiles = resolve_profiles(f.profile);

    SimulationOptions options;
    options.smart_object.window_seconds = f.window_seconds;
    options.actions = f.actions;
    options.buffer_optimized = !f.naive_buffer;
    options.algorithm_optimized = !f.naive_algorithm;
    options.strict_tick_accounting = f.strict_ticks;
    options.detection_slack = f.slack;
    if (!f.paper_mode) options.train_days = f.train_days;

    nlohmann::json config{{"paper_mode", f.paper_mode},
                          {"window_seconds", f.window_seconds},
                          {"profiles", profiles_json(profiles)},
                          {"actions", f.actions},
                          {"buffer_optimized", options.buffer_optimized},
                          {"algorithm_optimized", options.algorithm_optimized},
                          {"strict_tick_accounting", f.strict_ticks},
                          {"detection_slack", f.slack}};
    config["train_days"] = options.train_days ? nlohmann::json(*options.train_days) : nlohmann::json(nullptr);

    SimulationReport report;
    if (f.trace.empty() && f.synth_config.empty()) {
        if (!f.paper_mode) throw UsageError("simulate needs --trace, --synth-config or --paper-mode");
        const auto [baseline, so] = analytic_runs(f.events_per_day, f.actions_per_day, options, profiles);
        report = compare(baseline, so, profiles.battery);
        report.mode = "paper";
        config["source"] = "counts";
        config["events_per_day"] = f.events_per_day;
        config["actions_per_day"] = f.actions_per_day;
    } else {
        require_sensors(f);
        EventLog log;
        std::vector<ActionInterval> intervals;
        if (!f.trace.empty()) {
            auto loaded = load_trace_file(f.trace);
            report_diagnostics(loaded, err);
            log = std::move(loaded.log);
            intervals = std::move(loaded.intervals);
            config["source"] = "trace";
            config["trace"] = f.trace;
        } else {
            auto synth = load_synthetic_config(f.synth_config);
            if (f.seed) synth.seed = *f.seed;
            auto generated = generate_synthetic(synth);
            log = std::move(generated.log);
            intervals = std::move(generated.truth);
            config["source"] = "synthetic";
            config["synthetic"] = to_config_text(synth);
            config["seed"] = synth.seed;
        }
        config["sensors"] = f.sensors;

        SensorSubset subset;
        try {
            subset = resolve_subset(log, f.sensors);
        } catch (const InvalidConfig& e) {
            throw UsageError(e.what());
        }
        const auto stream = quantize(log, subset);
        const auto baseline = run_transmit_all(stream, profiles.radio);
        std::optional<SmartObject> trained;
        const auto classifier = run_smart_object(stream, subset, intervals, options, profiles, &trained);
        if (f.paper_mode) {
            report = compare(baseline, run_smart_object_analytic(stream, intervals, options, profiles), profiles.battery);
            report.mode = "paper";
            report.classifier = classifier;
        } else {
            report = compare(baseline, classifier, profiles.battery);
            report.mode = "classifier";
        }
        if (!f.models_out.empty() && trained) {
            nlohmann::json models = nlohmann::json::array();
            for (const auto& inst : trained->instances())
                models.push_back(model_to_json(inst.action, inst.model, f.window_seconds));
            with_output(f.models_out, out, [&](std::ostream& o) { o << models.dump(2) << '\n'; });
        }
    }
    report.config = std::move(config);
    with_output(f.out, out, [&](std::ostream& o) { emit_report(report, format, o); });
    return kExitOk;
}

int cmd_profiles(const Flags& f, std::ostream& out, std::ostream&) {
    const auto profiles = resolve_profiles(f.profile);
    out << (f.json ? profiles_to_json_text(profiles) : profiles_to_config_text(profiles));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Smart-object vs transmit-all sensor network simulator", "sosim"};
    app.require_subcommand(1);

    auto* stats = app.add_subcommand("stats", "Dataset statistics for a sensor subset");
    stats->add_option("--trace", f.trace, "CASAS-format event log")->required();
    stats->add_option("--sensors", f.sensors, "Comma-separated sensor ids")->delimiter(',')->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated trace");
    synth->add_option("--synth-config", f.synth_config, "Synthetic trace config")->required();
    synth->add_option("--seed", f.seed, "Override the config seed");
    synth->add_option("--out", f.out, "Output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Compare transmit-all and smart-object architectures");
    simulate->add_option("--trace", f.trace, "CASAS-format event log");
    simulate->add_option("--synth-config", f.synth_config, "Synthetic trace config");
    simulate->add_option("--sensors", f.sensors, "Sensor ids wired to the smart object")->delimiter(',');
    simulate->add_option("--actions", f.actions, "Action names to detect (default: all annotated)")->delimiter(',');
    simulate->add_option("--window-seconds", f.window_seconds, "Event window length N");
    simulate->add_option("--profile", f.profile, "Energy profile file (default $SOSIM_PROFILE)");
    simulate->add_flag("--paper-mode", f.paper_mode, "Transmit annotated actions; train on the whole trace");
    simulate->add_option("--train-days", f.train_days, "Days of the trace used for training");
    simulate->add_option("--out", f.out, "Report file (default stdout)");
    simulate->add_option("--models-out", f.models_out, "Write trained models as JSON");
    simulate->add_option("--format", f.format, "json or csv");
    simulate->add_option("--seed", f.seed, "Override the synthetic config seed");
    simulate->add_option("--events-per-day", f.events_per_day, "Paper mode without a trace: sensor events per day");
    simulate->add_option("--actions-per-day", f.actions_per_day, "Paper mode without a trace: actions per day");
    simulate->add_option("--slack", f.slack, "Detection tally slack in seconds");
    simulate->add_flag("--strict-ticks", f.strict_ticks, "Charge one FIFO push per event-free second in CPU load");
    simulate->add_flag("--naive-buffer", f.naive_buffer, "Cost events with the full-traversal buffer");
    simulate->add_flag("--naive-algorithm", f.naive_algorithm, "Cost events with the unsimplified classifier");

    auto* profiles = app.add_subcommand("profiles", "Print the energy profile constants");
    profiles->add_option("--profile", f.profile, "Profile file to print instead of the defaults");
    profiles->add_flag("--json", f.json, "Print JSON instead of key-value text");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*stats) return cmd_stats(f, out, err);
        if (*synth) return cmd_synth(f, out, err);
        if (*simulate) return cmd_simulate(f, out, err);
        return cmd_profiles(f, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
}

}  // namespace sosim
