#include "sosim/sim.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace sosim;
using doctest::Approx;

namespace {

struct Fixture {
    SyntheticTrace trace;
    SensorSubset subset;
    ImpulseStream stream;
};

Fixture seed7(SensorSubset subset = {0, 1, 2, 3, 4}) {
    Fixture f{generate_synthetic(load_synthetic_config(test::fixture("synth_seed7.cfg"))), std::move(subset), {}};
    f.stream = quantize(f.trace.log, f.subset);
    return f;
}

ImpulseStream stream_of(std::vector<SensorEvent> events, Tick first, Tick last) {
    ImpulseStream s;
    s.events = std::move(events);
    s.first = {first, 0};
    s.last = {last, 0};
    return s;
}

}  // namespace

TEST_CASE("transmit-all counts every impulse event") {
    const Tick day = 1'255'651'200;  // 2009-10-16 00:00:00
    const auto s = stream_of({{day + 5, 0}, {day + 3600 + 1, 1}, {day + 3600 + 2, 0}}, day, day + 86400);
    const auto run = run_transmit_all(s, {});
    CHECK(run.transmissions == 3);
    CHECK(run.transmissions_by_hour[0] == 1);
    CHECK(run.transmissions_by_hour[1] == 2);
    CHECK(run.energy.transmit == Approx(3 * 587.5e-6).epsilon(1e-12));
    CHECK(run.energy.processing == 0.0);
    CHECK(run.days == 1.0);

    const auto empty = run_transmit_all(ImpulseStream{}, {});
    CHECK(empty.transmissions == 0);
    CHECK(empty.energy.total() == 0.0);
    CHECK(empty.days == 0.0);
}

TEST_CASE("transmit-all on the seed 7 fixture matches a line-count oracle") {
    const auto f = seed7();
    std::ostringstream text;
    write_trace(text, f.trace.log);
    // Oracle: distinct (sensor, whole second) pairs among kitchen ON lines.
    std::set<std::string> impulses;
    std::istringstream lines(text.str());
    std::string line;
    while (std::getline(lines, line)) {
        const auto id_at = line.find(' ', 11) + 1;
        const auto id = line.substr(id_at, 4);
        const auto value = line.substr(id_at + 5);
        if (id >= "S000" && id <= "S004" && value.rfind("ON", 0) == 0) impulses.insert(id + line.substr(0, 19));
    }
    const auto run = run_transmit_all(f.stream, {});
    CHECK(run.transmissions == impulses.size());
    CHECK(run.transmissions == 1596);  // frozen from the oracle
    std::uint64_t binned = 0;
    for (auto c : run.transmissions_by_hour) binned += c;
    CHECK(binned == run.transmissions);
}

TEST_CASE("untrained smart object only pays for processing") {
    const auto f = seed7();
    const auto run = run_smart_object(f.stream, f.subset, {}, {}, {});
    CHECK(run.transmissions == 0);
    CHECK(run.energy.transmit == 0.0);
    CHECK(run.energy.processing == Approx(f.stream.events.size() * 2.3424e-6).epsilon(1e-12));
    CHECK(run.events_processed == f.stream.events.size());
}

TEST_CASE("smart object run invariants") {
    const auto f = seed7();
    SimulationOptions options;
    options.train_days = 10.0;
    const EnergyProfiles profiles;
    const auto run = run_smart_object(f.stream, f.subset, f.trace.truth, options, profiles);
    const auto baseline = run_transmit_all(f.stream, profiles.radio);

    CHECK(run.transmissions <= run.events_processed);
    CHECK(run.transmissions <= baseline.transmissions);
    std::uint64_t binned = 0;
    for (auto c : run.transmissions_by_hour) binned += c;
    CHECK(binned == run.transmissions);
    // energy recomputed from counts
    CHECK(run.energy.processing ==
          static_cast<double>(run.events_processed) * mcu_event_energy(profiles.mcu, 0.000630 + 0.000346));
    CHECK(run.energy.transmit == static_cast<double>(run.transmissions) * tx_event_energy(profiles.radio));
    REQUIRE(run.detection.has_value());
    CHECK(run.cpu_load > 0.0);
    CHECK(run.cpu_load < 0.005);
}

TEST_CASE("learning ranks generating sensors above silent ones") {
    const auto trace = generate_synthetic(load_synthetic_config(test::fixture("synth_clean.cfg")));
    SensorSubset all;
    for (SensorIndex i = 0; i < 10; ++i) all.insert(i);
    const auto stream = quantize(trace.log, all);
    SimulationOptions options;
    options.train_days = 10.0;
    std::optional<SmartObject> so;
    const auto run = run_smart_object(stream, all, trace.truth, options, {}, &so);
    REQUIRE(so.has_value());

    const auto& kitchen = so->model("Kitchen_Activity");
    std::vector<SensorIndex> silent;
    for (SensorIndex s = 0; s < 10; ++s)
        if (kitchen.c[so->local_index(s)] == 0) silent.push_back(s);
    CHECK_FALSE(silent.empty());
    for (SensorIndex g : {0, 1, 2, 3, 4})
        for (auto s : silent) CHECK(kitchen.weights[so->local_index(g)] > kitchen.weights[so->local_index(s)]);

    REQUIRE(run.detection.has_value());
    CHECK(run.detection->true_positive >= 1);
}

TEST_CASE("compare fills savings and battery fields") {
    const EnergyProfiles profiles;
    const auto [baseline, so] = analytic_runs(1795, 7, {}, profiles);
    const auto report = compare(baseline, so, profiles.battery);
    CHECK(report.baseline.transmissions == 1795);
    CHECK(report.smart_object.transmissions == 7);
    CHECK(*report.comparison.savings_energy_pct == Approx(99.2113214722).epsilon(1e-10));
    CHECK(*report.comparison.energy_per_day_baseline == Approx(1.0545625).epsilon(1e-12));
    CHECK(*report.comparison.energy_per_day_so == Approx(8.317108e-3).epsilon(1e-12));
    CHECK(*report.comparison.battery_days_so == Approx(81.158).epsilon(1e-4));
    CHECK(*report.comparison.batteries_per_day_baseline == Approx(1.5623).epsilon(1e-4));
    std::uint64_t binned = 0;
    for (auto c : report.smart_object.transmissions_by_hour) binned += c;
    CHECK(binned == 7);

    const auto same = compare(baseline, baseline, profiles.battery);
    CHECK(*same.comparison.savings_energy_pct == 0.0);
    CHECK(*same.comparison.savings_transmissions_pct == 0.0);

    auto longer = so;
    longer.days = 2.0;
    CHECK_THROWS_AS(compare(baseline, longer, profiles.battery), MismatchedSpan);
}

TEST_CASE("synthetic comparison is recomputable from the two runs") {
    const auto f = seed7();
    SimulationOptions options;
    options.train_days = 10.0;
    const EnergyProfiles profiles;
    const auto b = run_transmit_all(f.stream, profiles.radio);
    const auto s = run_smart_object(f.stream, f.subset, f.trace.truth, options, profiles);
    const auto r = compare(b, s, profiles.battery);
    const double days = f.stream.span_days();
    CHECK(r.comparison.days == days);
    CHECK(*r.comparison.energy_per_day_baseline == b.energy.total() / days);
    CHECK(*r.comparison.energy_per_day_so == s.energy.total() / days);
    CHECK(*r.comparison.savings_energy_pct == 100.0 * (1.0 - s.energy.total() / b.energy.total()));
    CHECK(*r.comparison.savings_transmissions_pct ==
          100.0 * (1.0 - double(s.transmissions) / double(b.transmissions)));
    CHECK(*r.comparison.battery_days_so == profiles.battery.capacity / (s.energy.total() / days));
}

TEST_CASE("paper mode transmits the annotated actions") {
    const auto f = seed7();
    const auto run = run_smart_object_analytic(f.stream, f.trace.truth, {}, {});
    CHECK(run.transmissions == f.trace.truth.size());
    SimulationOptions only_kitchen;
    only_kitchen.actions = {"Kitchen_Activity"};
    const auto kitchen = run_smart_object_analytic(f.stream, f.trace.truth, only_kitchen, {});
    std::uint64_t expected = 0;
    for (const auto& iv : f.trace.truth) expected += iv.action == "Kitchen_Activity";
    CHECK(kitchen.transmissions == expected);
}

TEST_CASE("detection tally") {
    const std::vector<ActionInterval> truth{{"A", 100, 200, false}, {"A", 300, 400, false}, {"B", 150, 160, false}};
    const auto exact = detection_tally({{200, "A"}, {400, "A"}, {160, "B"}}, truth, 0);
    CHECK(exact == DetectionTally{3, 0, 0});
    CHECK(detection_tally({}, truth, 0) == DetectionTally{0, 0, 3});
    CHECK(detection_tally({{120, "A"}, {130, "A"}}, truth, 0) == DetectionTally{1, 1, 2});
    CHECK(detection_tally({{210, "A"}}, truth, 0) == DetectionTally{0, 1, 3});
    CHECK(detection_tally({{210, "A"}}, truth, 10) == DetectionTally{1, 0, 2});
    CHECK(detection_tally({{155, "A"}}, truth, 0) == DetectionTally{1, 0, 2});  // names must match
    CHECK(detection_tally({{155, "C"}}, truth, 0) == DetectionTally{0, 1, 3});
    CHECK_THROWS_AS(detection_tally({}, truth, -1), std::invalid_argument);
}

TEST_CASE("JSON report round-trips") {
    const auto f = seed7();
    SimulationOptions options;
    options.train_days = 10.0;
    const EnergyProfiles profiles;
    auto report = compare(run_transmit_all(f.stream, profiles.radio),
                          run_smart_object(f.stream, f.subset, f.trace.truth, options, profiles), profiles.battery);
    report.config = {{"seed", 7}};
    report.classifier = report.smart_object;

    std::ostringstream out;
    emit_report(report, ReportFormat::Json, out);
    const auto doc = nlohmann::json::parse(out.str());
    for (const char* key : {"config", "baseline", "smart_object", "comparison"}) CHECK(doc.contains(key));
    CHECK(report_from_json(doc) == report);

    std::ostringstream again;
    emit_report(report_from_json(doc), ReportFormat::Json, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("CSV report has 24 rows per run") {
    const EnergyProfiles profiles;
    const auto [b, s] = analytic_runs(1795, 7, {}, profiles);
    const auto report = compare(b, s, profiles.battery);
    std::ostringstream out;
    emit_report(report, ReportFormat::Csv, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "run,hour,count");
    std::map<std::string, int> rows;
    while (std::getline(lines, line) && !line.empty()) ++rows[line.substr(0, line.find(','))];
    CHECK(rows.size() == 2);
    CHECK(rows["baseline"] == 24);
    CHECK(rows["smart_object"] == 24);
    std::getline(lines, line);
    CHECK(line == "metric,baseline,smart_object");
}

TEST_CASE("empty stream report is all zero with a valid schema") {
    const EnergyProfiles profiles;
    ImpulseStream empty;
    const auto report = compare(run_transmit_all(empty, profiles.radio),
                                run_smart_object(empty, {0}, {}, {}, profiles), profiles.battery);
    CHECK(report.baseline.transmissions == 0);
    CHECK_FALSE(report.comparison.savings_energy_pct.has_value());
    std::ostringstream json;
    emit_report(report, ReportFormat::Json, json);
    CHECK(report_from_json(nlohmann::json::parse(json.str())) == report);
    std::ostringstream csv;
    emit_report(report, ReportFormat::Csv, csv);
    CHECK(csv.str().find("baseline,23,0\n") != std::string::npos);
    CHECK(csv.str().find("smart_object,23,0\n") != std::string::npos);
}

TEST_CASE("simulation is deterministic") {
    auto render = [] {
        const auto f = seed7();
        SimulationOptions options;
        options.train_days = 10.0;
        const EnergyProfiles profiles;
        const auto report = compare(run_transmit_all(f.stream, profiles.radio),
                                    run_smart_object(f.stream, f.subset, f.trace.truth, options, profiles),
                                    profiles.battery);
        std::ostringstream out;
        emit_report(report, ReportFormat::Json, out);
        return out.str();
    };
    CHECK(render() == render());
}

TEST_CASE("strict tick accounting charges event-free seconds") {
    const auto f = seed7();
    SimulationOptions lax, strict;
    strict.strict_tick_accounting = true;
    const auto a = run_smart_object(f.stream, f.subset, {}, lax, {});
    const auto b = run_smart_object(f.stream, f.subset, {}, strict, {});
    CHECK(b.cpu_load > a.cpu_load);
    CHECK(b.energy == a.energy);
}
