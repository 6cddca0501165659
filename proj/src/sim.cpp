#include "sosim/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace sosim {

namespace {

Tick ticks_covered(const ImpulseStream& stream) { return stream.last.tick() - stream.first.tick() + 1; }

double processing_time(const SimulationOptions& options, const EnergyProfiles& profiles) {
    return per_event_processing_time(profiles.mcu.timing, options.buffer_optimized, options.algorithm_optimized);
}

void fill_cpu_load(ArchitectureRun& run, double busy_seconds, double span_seconds) {
    const auto load = cpu_load(busy_seconds / span_seconds, 1.0);
    run.cpu_load = load.fraction;
    run.cpu_overload = load.overload;
}

void fill_stream_cpu_load(ArchitectureRun& run, const ImpulseStream& stream, const SimulationOptions& options,
                          const EnergyProfiles& profiles) {
    if (stream.events.empty()) return;
    const Tick span = ticks_covered(stream);
    double busy = static_cast<double>(run.events_processed) * processing_time(options, profiles);
    if (options.strict_tick_accounting) {
        Tick busy_ticks = 0;
        Tick previous = std::numeric_limits<Tick>::min();
        for (const auto& e : stream.events)
            if (e.tick != previous) ++busy_ticks, previous = e.tick;
        busy += static_cast<double>(span - busy_ticks) * profiles.mcu.timing.fifo_optimized;
    }
    fill_cpu_load(run, busy, static_cast<double>(span));
}

// Answers "does any interval overlap [lo, hi]?" in O(log n).
class OverlapIndex {
public:
    explicit OverlapIndex(std::vector<ActionInterval> intervals) {
        std::sort(intervals.begin(), intervals.end(),
                  [](const ActionInterval& a, const ActionInterval& b) { return a.begin < b.begin; });
        Tick running = std::numeric_limits<Tick>::min();
        for (const auto& i : intervals) {
            begins_.push_back(i.begin);
            running = std::max(running, i.end);
            max_end_.push_back(running);
        }
    }

    bool overlaps(Tick lo, Tick hi) const {
        const auto it = std::upper_bound(begins_.begin(), begins_.end(), hi);
        if (it == begins_.begin()) return false;
        return max_end_[static_cast<std::size_t>(it - begins_.begin()) - 1] >= lo;
    }

private:
    std::vector<Tick> begins_;
    std::vector<Tick> max_end_;
};

std::vector<ActionInterval> filter_actions(const std::vector<ActionInterval>& intervals,
                                           const std::vector<std::string>& actions) {
    std::vector<ActionInterval> out;
    for (const auto& i : intervals)
        if (std::find(actions.begin(), actions.end(), i.action) != actions.end()) out.push_back(i);
    return out;
}

}  // namespace

std::vector<std::string> selected_actions(const std::vector<ActionInterval>& intervals,
                                          const SimulationOptions& options) {
    if (!options.actions.empty()) return options.actions;
    std::vector<std::string> names;
    for (const auto& i : intervals) names.push_back(i.action);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

ArchitectureRun run_transmit_all(const ImpulseStream& stream, const RadioProfile& radio) {
    ArchitectureRun run;
    run.kind = ArchitectureKind::TransmitAll;
    run.events_processed = stream.events.size();
    run.transmissions = stream.events.size();
    for (const auto& e : stream.events) ++run.transmissions_by_hour[static_cast<std::size_t>(hour_of_day(e.tick))];
    run.energy.transmit = static_cast<double>(run.transmissions) * tx_event_energy(radio);
    if (!stream.events.empty()) run.days = stream.span_days();
    return run;
}

ArchitectureRun run_smart_object(const ImpulseStream& stream, const SensorSubset& subset,
                                 const std::vector<ActionInterval>& intervals, const SimulationOptions& options,
                                 const EnergyProfiles& profiles, std::optional<SmartObject>* trained) {
    ArchitectureRun run;
    run.kind = ArchitectureKind::SmartObject;
    if (stream.events.empty()) return run;
    run.days = stream.span_days();

    const auto actions = selected_actions(intervals, options);
    const auto tracked = filter_actions(intervals, actions);
    SmartObject so(std::vector<SensorIndex>(subset.begin(), subset.end()), actions, options.smart_object);

    const Tick t0 = stream.first.tick();
    const Tick t1 = stream.last.tick();
    const Tick train_end = options.train_days
                               ? t0 + static_cast<Tick>(std::llround(*options.train_days * kSecondsPerDay))
                               : std::numeric_limits<Tick>::max();
    const auto window = static_cast<Tick>(options.smart_object.window_seconds);

    std::vector<OverlapIndex> overlap;
    for (const auto& a : actions) overlap.emplace_back(filter_actions(tracked, {a}));

    std::vector<const ActionInterval*> by_end;
    for (const auto& i : tracked)
        if (i.end < train_end) by_end.push_back(&i);
    std::sort(by_end.begin(), by_end.end(), [](auto* a, auto* b) { return a->end < b->end; });

    auto next_event = stream.events.begin();
    auto next_learn = by_end.begin();
    for (Tick t = t0; t <= t1; ++t) {
        auto emit = [&](const std::vector<std::string>& names) {
            for (const auto& n : names) {
                run.emitted_actions.push_back({t, n});
                ++run.transmissions_by_hour[static_cast<std::size_t>(hour_of_day(t))];
            }
        };
        if (next_event == stream.events.end() || next_event->tick != t) {
            emit(so.predict(std::nullopt));
        } else {
            for (; next_event != stream.events.end() && next_event->tick == t; ++next_event)
                emit(so.predict(next_event->sensor_index));
        }

        if (t >= train_end) continue;
        for (; next_learn != by_end.end() && (*next_learn)->end <= t; ++next_learn)
            if ((*next_learn)->end == t) so.learn((*next_learn)->action);
        if ((t - t0 + 1) % window == 0) {
            for (std::size_t a = 0; a < actions.size(); ++a)
                if (!overlap[a].overlaps(t - window + 1, t)) so.observe_negative(actions[a]);
        }
    }

    run.events_processed = stream.events.size();
    run.transmissions = run.emitted_actions.size();
    run.energy.processing =
        static_cast<double>(run.events_processed) * mcu_event_energy(profiles.mcu, processing_time(options, profiles));
    run.energy.transmit = static_cast<double>(run.transmissions) * tx_event_energy(profiles.radio);
    fill_stream_cpu_load(run, stream, options, profiles);

    std::vector<ActionInterval> held_out;
    std::vector<EmittedAction> evaluated;
    for (const auto& i : tracked)
        if (!options.train_days || i.begin >= train_end) held_out.push_back(i);
    for (const auto& e : run.emitted_actions)
        if (!options.train_days || e.tick >= train_end) evaluated.push_back(e);
    run.detection = detection_tally(evaluated, held_out, options.detection_slack);
    if (trained) trained->emplace(std::move(so));
    return run;
}

ArchitectureRun run_smart_object_analytic(const ImpulseStream& stream, const std::vector<ActionInterval>& intervals,
                                          const SimulationOptions& options, const EnergyProfiles& profiles) {
    ArchitectureRun run;
    run.kind = ArchitectureKind::SmartObject;
    if (stream.events.empty()) return run;
    run.days = stream.span_days();
    auto tracked = filter_actions(intervals, selected_actions(intervals, options));
    std::sort(tracked.begin(), tracked.end(),
              [](const ActionInterval& a, const ActionInterval& b) { return a.end < b.end; });
    for (const auto& i : tracked) {
        run.emitted_actions.push_back({i.end, i.action});
        ++run.transmissions_by_hour[static_cast<std::size_t>(hour_of_day(i.end))];
    }
    run.events_processed = stream.events.size();
    run.transmissions = tracked.size();
    run.energy.processing =
        static_cast<double>(run.events_processed) * mcu_event_energy(profiles.mcu, processing_time(options, profiles));
    run.energy.transmit = static_cast<double>(run.transmissions) * tx_event_energy(profiles.radio);
    fill_stream_cpu_load(run, stream, options, profiles);
    return run;
}

std::pair<ArchitectureRun, ArchitectureRun> analytic_runs(std::uint64_t events_per_day, std::uint64_t actions_per_day,
                                                          const SimulationOptions& options,
                                                          const EnergyProfiles& profiles) {
    auto spread = [](std::uint64_t count) {
        std::array<std::uint64_t, 24> bins{};
        for (std::size_t h = 0; h < 24; ++h) bins[h] = count / 24 + (h < count % 24 ? 1 : 0);
        return bins;
    };
    const double t_proc = processing_time(options, profiles);

    ArchitectureRun baseline;
    baseline.kind = ArchitectureKind::TransmitAll;
    baseline.days = 1.0;
    baseline.events_processed = events_per_day;
    baseline.transmissions = events_per_day;
    baseline.transmissions_by_hour = spread(events_per_day);
    baseline.energy.transmit = daily_energy_tx_all(static_cast<double>(events_per_day), profiles.radio);

    ArchitectureRun so;
    so.kind = ArchitectureKind::SmartObject;
    so.days = 1.0;
    so.events_processed = events_per_day;
    so.transmissions = actions_per_day;
    so.transmissions_by_hour = spread(actions_per_day);
    so.energy = daily_energy_so(static_cast<double>(events_per_day), static_cast<double>(actions_per_day),
                                profiles.mcu, profiles.radio, t_proc);
    double busy = static_cast<double>(events_per_day) * t_proc;
    if (options.strict_tick_accounting && events_per_day < static_cast<std::uint64_t>(kSecondsPerDay))
        busy += static_cast<double>(static_cast<std::uint64_t>(kSecondsPerDay) - events_per_day) *
                profiles.mcu.timing.fifo_optimized;
    fill_cpu_load(so, busy, static_cast<double>(kSecondsPerDay));
    return {baseline, so};
}

SimulationReport compare(const ArchitectureRun& baseline, const ArchitectureRun& smart_object,
                         const BatteryProfile& battery) {
    const double scale = std::max({1.0, std::abs(baseline.days), std::abs(smart_object.days)});
    if (std::abs(baseline.days - smart_object.days) > 1e-9 * scale) throw MismatchedSpan();

    SimulationReport report;
    report.baseline = baseline;
    report.smart_object = smart_object;
    auto& c = report.comparison;
    c.days = baseline.days;
    if (c.days > 0.0) {
        c.energy_per_day_baseline = baseline.energy.total() / c.days;
        c.energy_per_day_so = smart_object.energy.total() / c.days;
        c.transmissions_per_day_baseline = static_cast<double>(baseline.transmissions) / c.days;
        c.transmissions_per_day_so = static_cast<double>(smart_object.transmissions) / c.days;
        if (*c.energy_per_day_baseline > 0.0) {
            const auto life = battery_lifetime(*c.energy_per_day_baseline, battery);
            c.battery_days_baseline = life.days;
            c.batteries_per_day_baseline = life.batteries_per_day;
        }
        if (*c.energy_per_day_so > 0.0) c.battery_days_so = battery_lifetime(*c.energy_per_day_so, battery).days;
    }
    if (baseline.energy.total() > 0.0) c.savings_energy_pct = savings(baseline.energy.total(), smart_object.energy.total());
    if (baseline.transmissions > 0)
        c.savings_transmissions_pct =
            savings(static_cast<double>(baseline.transmissions), static_cast<double>(smart_object.transmissions));
    return report;
}

DetectionTally detection_tally(const std::vector<EmittedAction>& emissions, const std::vector<ActionInterval>& truth,
                               Tick slack) {
    if (slack < 0) throw std::invalid_argument("slack must be non-negative");
    std::vector<std::size_t> order(truth.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return truth[a].begin < truth[b].begin; });
    std::vector<EmittedAction> sorted = emissions;
    std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.tick < b.tick; });

    std::vector<bool> matched(truth.size(), false);
    DetectionTally tally;
    for (const auto& e : sorted) {
        bool hit = false;
        for (auto idx : order) {
            const auto& iv = truth[idx];
            if (matched[idx] || iv.action != e.action) continue;
            if (iv.begin - slack > e.tick) break;
            if (e.tick <= iv.end + slack) {
                matched[idx] = hit = true;
                break;
            }
        }
        hit ? ++tally.true_positive : ++tally.false_positive;
    }
    tally.missed = static_cast<std::uint64_t>(std::count(matched.begin(), matched.end(), false));
    return tally;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

const char* kind_name(ArchitectureKind k) { return k == ArchitectureKind::TransmitAll ? "transmit_all" : "smart_object"; }

json run_to_json(const ArchitectureRun& r) {
    json emitted = json::array();
    for (const auto& e : r.emitted_actions) emitted.push_back({{"tick", e.tick}, {"action", e.action}});
    json j{{"kind", kind_name(r.kind)},
           {"days", r.days},
           {"events_processed", r.events_processed},
           {"transmissions", r.transmissions},
           {"transmissions_by_hour", r.transmissions_by_hour},
           {"energy", {{"processing", r.energy.processing}, {"transmit", r.energy.transmit}, {"total", r.energy.total()}}},
           {"cpu_load", r.cpu_load},
           {"cpu_overload", r.cpu_overload},
           {"emitted_actions", emitted}};
    j["detection"] = r.detection ? json{{"true_positive", r.detection->true_positive},
                                        {"false_positive", r.detection->false_positive},
                                        {"missed", r.detection->missed}}
                                 : json(nullptr);
    return j;
}

ArchitectureRun run_from_json(const json& j) {
    ArchitectureRun r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "transmit_all")
        r.kind = ArchitectureKind::TransmitAll;
    else if (kind == "smart_object")
        r.kind = ArchitectureKind::SmartObject;
    else
        throw InvalidConfig("unknown run kind '" + kind + "'");
    r.days = j.at("days").get<double>();
    r.events_processed = j.at("events_processed").get<std::uint64_t>();
    r.transmissions = j.at("transmissions").get<std::uint64_t>();
    r.transmissions_by_hour = j.at("transmissions_by_hour").get<std::array<std::uint64_t, 24>>();
    r.energy.processing = j.at("energy").at("processing").get<double>();
    r.energy.transmit = j.at("energy").at("transmit").get<double>();
    r.cpu_load = j.at("cpu_load").get<double>();
    r.cpu_overload = j.at("cpu_overload").get<bool>();
    for (const auto& e : j.at("emitted_actions"))
        r.emitted_actions.push_back({e.at("tick").get<Tick>(), e.at("action").get<std::string>()});
    if (const auto& d = j.at("detection"); !d.is_null())
        r.detection = DetectionTally{d.at("true_positive").get<std::uint64_t>(), d.at("false_positive").get<std::uint64_t>(),
                                     d.at("missed").get<std::uint64_t>()};
    return r;
}

std::string number_text(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string number_text(const std::optional<double>& v) { return v ? number_text(*v) : std::string(); }

}  // namespace

json report_to_json(const SimulationReport& report) {
    const auto& c = report.comparison;
    json j{{"mode", report.mode},
           {"config", report.config},
           {"baseline", run_to_json(report.baseline)},
           {"smart_object", run_to_json(report.smart_object)},
           {"comparison",
            {{"days", c.days},
             {"energy_per_day_baseline", optional_number(c.energy_per_day_baseline)},
             {"energy_per_day_so", optional_number(c.energy_per_day_so)},
             {"transmissions_per_day_baseline", optional_number(c.transmissions_per_day_baseline)},
             {"transmissions_per_day_so", optional_number(c.transmissions_per_day_so)},
             {"savings_energy_pct", optional_number(c.savings_energy_pct)},
             {"savings_transmissions_pct", optional_number(c.savings_transmissions_pct)},
             {"battery_days_baseline", optional_number(c.battery_days_baseline)},
             {"battery_days_so", optional_number(c.battery_days_so)},
             {"batteries_per_day_baseline", optional_number(c.batteries_per_day_baseline)}}}};
    j["classifier"] = report.classifier ? run_to_json(*report.classifier) : json(nullptr);
    return j;
}

SimulationReport report_from_json(const json& j) {
    try {
        SimulationReport r;
        r.mode = j.at("mode").get<std::string>();
        r.config = j.at("config");
        r.baseline = run_from_json(j.at("baseline"));
        r.smart_object = run_from_json(j.at("smart_object"));
        if (!j.at("classifier").is_null()) r.classifier = run_from_json(j.at("classifier"));
        const auto& c = j.at("comparison");
        auto& out = r.comparison;
        out.days = c.at("days").get<double>();
        out.energy_per_day_baseline = number_or_null(c.at("energy_per_day_baseline"));
        out.energy_per_day_so = number_or_null(c.at("energy_per_day_so"));
        out.transmissions_per_day_baseline = number_or_null(c.at("transmissions_per_day_baseline"));
        out.transmissions_per_day_so = number_or_null(c.at("transmissions_per_day_so"));
        out.savings_energy_pct = number_or_null(c.at("savings_energy_pct"));
        out.savings_transmissions_pct = number_or_null(c.at("savings_transmissions_pct"));
        out.battery_days_baseline = number_or_null(c.at("battery_days_baseline"));
        out.battery_days_so = number_or_null(c.at("battery_days_so"));
        out.batteries_per_day_baseline = number_or_null(c.at("batteries_per_day_baseline"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("report document: ") + e.what());
    }
}

void emit_report(const SimulationReport& report, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::Json) {
        out << report_to_json(report).dump(2) << '\n';
    } else {
        out << "run,hour,count\n";
        auto rows = [&](const char* name, const ArchitectureRun& run) {
            for (std::size_t h = 0; h < 24; ++h) out << name << ',' << h << ',' << run.transmissions_by_hour[h] << '\n';
        };
        rows("baseline", report.baseline);
        rows("smart_object", report.smart_object);
        if (report.classifier) rows("classifier", *report.classifier);

        const auto& b = report.baseline;
        const auto& s = report.smart_object;
        const auto& c = report.comparison;
        out << "\nmetric,baseline,smart_object\n"
            << "events_processed," << b.events_processed << ',' << s.events_processed << '\n'
            << "transmissions," << b.transmissions << ',' << s.transmissions << '\n'
            << "transmissions_per_day," << number_text(c.transmissions_per_day_baseline) << ','
            << number_text(c.transmissions_per_day_so) << '\n'
            << "energy_processing_j," << number_text(b.energy.processing) << ',' << number_text(s.energy.processing) << '\n'
            << "energy_transmit_j," << number_text(b.energy.transmit) << ',' << number_text(s.energy.transmit) << '\n'
            << "energy_total_j," << number_text(b.energy.total()) << ',' << number_text(s.energy.total()) << '\n'
            << "energy_per_day_j," << number_text(c.energy_per_day_baseline) << ',' << number_text(c.energy_per_day_so)
            << '\n'
            << "battery_days," << number_text(c.battery_days_baseline) << ',' << number_text(c.battery_days_so) << '\n'
            << "cpu_load," << number_text(b.cpu_load) << ',' << number_text(s.cpu_load) << '\n'
            << "savings_energy_pct,," << number_text(c.savings_energy_pct) << '\n'
            << "savings_transmissions_pct,," << number_text(c.savings_transmissions_pct) << '\n';
    }
    if (!out) throw IoFailure("report write failed");
}

void emit_report_file(const SimulationReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    emit_report(report, format, out);
}

}  // namespace sosim
