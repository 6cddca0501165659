#pragma once

#include "sosim/energy.hpp"
#include "sosim/sensor_frontend.hpp"
#include "sosim/smart_object.hpp"
#include "sosim/trace.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <iosfwd>
#include <optional>

namespace sosim {

enum class ArchitectureKind { TransmitAll, SmartObject };

struct EmittedAction {
    Tick tick = 0;
    std::string action;

    friend bool operator==(const EmittedAction&, const EmittedAction&) = default;
};

struct DetectionTally {
    std::uint64_t true_positive = 0;
    std::uint64_t false_positive = 0;
    std::uint64_t missed = 0;

    friend bool operator==(const DetectionTally&, const DetectionTally&) = default;
};

/// Totals of one architecture over the whole replayed span.
struct ArchitectureRun {
    ArchitectureKind kind = ArchitectureKind::TransmitAll;
    double days = 0.0;
    std::uint64_t events_processed = 0;
    std::uint64_t transmissions = 0;
    std::array<std::uint64_t, 24> transmissions_by_hour{};
    EnergyBreakdown energy;
    double cpu_load = 0.0;
    bool cpu_overload = false;
    std::vector<EmittedAction> emitted_actions;
    std::optional<DetectionTally> detection;

    friend bool operator==(const ArchitectureRun&, const ArchitectureRun&) = default;
};

struct Comparison {
    double days = 0.0;
    std::optional<double> energy_per_day_baseline;
    std::optional<double> energy_per_day_so;
    std::optional<double> transmissions_per_day_baseline;
    std::optional<double> transmissions_per_day_so;
    std::optional<double> savings_energy_pct;
    std::optional<double> savings_transmissions_pct;
    std::optional<double> battery_days_baseline;
    std::optional<double> battery_days_so;
    std::optional<double> batteries_per_day_baseline;

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct SimulationReport {
    std::string mode = "classifier";  // "classifier" or "paper"
    nlohmann::json config = nlohmann::json::object();
    ArchitectureRun baseline;
    ArchitectureRun smart_object;
    std::optional<ArchitectureRun> classifier;  // classifier-driven run when smart_object is analytic
    Comparison comparison;

    friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

struct SimulationOptions {
    SmartObjectConfig smart_object;
    std::vector<std::string> actions;         // empty: every annotated action
    std::optional<double> train_days;         // empty: train on the whole trace
    bool buffer_optimized = true;
    bool algorithm_optimized = true;
    bool strict_tick_accounting = false;      // event-free seconds cost one FIFO push in CPU load
    Tick detection_slack = 60;                // seconds
};

/// Every impulse event is one transmission.
ArchitectureRun run_transmit_all(const ImpulseStream& stream, const RadioProfile& radio);

/// Replays the stream second by second through a smart object wired to
/// `subset`, learning at annotation end markers (and sampling negatives every
/// window length) inside the training horizon. Emissions are transmissions.
/// The detection tally covers intervals beginning after the training horizon,
/// or all intervals when training spans the whole trace.
/// When `trained` is given it receives the smart object in its final state.
ArchitectureRun run_smart_object(const ImpulseStream& stream, const SensorSubset& subset,
                                 const std::vector<ActionInterval>& intervals, const SimulationOptions& options,
                                 const EnergyProfiles& profiles, std::optional<SmartObject>* trained = nullptr);

/// Smart-object costs when exactly the annotated intervals are transmitted
/// (one per interval, at its end tick).
ArchitectureRun run_smart_object_analytic(const ImpulseStream& stream, const std::vector<ActionInterval>& intervals,
                                          const SimulationOptions& options, const EnergyProfiles& profiles);

/// One-day analytic pair from counts alone. No timing is known, so the
/// hourly bins spread transmissions evenly (remainder to the earliest hours).
std::pair<ArchitectureRun, ArchitectureRun> analytic_runs(std::uint64_t events_per_day, std::uint64_t actions_per_day,
                                                          const SimulationOptions& options,
                                                          const EnergyProfiles& profiles);

/// Fills savings and battery fields. Throws MismatchedSpan when the runs
/// cover different durations. Ratios with a zero denominator are left empty.
SimulationReport compare(const ArchitectureRun& baseline, const ArchitectureRun& smart_object,
                         const BatteryProfile& battery);

/// Greedy matching in emission order: an emission inside
/// [begin - slack, end + slack] of an unmatched interval of the same action
/// is a true positive for the earliest such interval; otherwise a false positive.
DetectionTally detection_tally(const std::vector<EmittedAction>& emissions, const std::vector<ActionInterval>& truth,
                               Tick slack);

/// Actions selected by `options`, or every annotated action name (sorted).
std::vector<std::string> selected_actions(const std::vector<ActionInterval>& intervals,
                                          const SimulationOptions& options);

enum class ReportFormat { Json, Csv };

nlohmann::json report_to_json(const SimulationReport& report);
SimulationReport report_from_json(const nlohmann::json& j);

/// JSON: the report document. CSV: `run,hour,count` rows (24 per run), a blank
/// line, then a `metric,baseline,smart_object` comparison table.
void emit_report(const SimulationReport& report, ReportFormat format, std::ostream& out);
void emit_report_file(const SimulationReport& report, ReportFormat format, const std::string& path);

}  // namespace sosim
