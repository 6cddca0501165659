#pragma once

#include <iosfwd>
#include <string>

namespace sosim {

/// ZigBee transceiver cost of sending one short frame (CC2420 figures).
struct RadioProfile {
    double csma_current = 0.0325;   // A
    double csma_duration = 0.0029;  // s
    double wake_current = 0.013;    // A
    double wake_duration = 0.013;   // s
    double tx_current = 0.0305;     // A
    double tx_duration = 0.001;     // s
    double supply_voltage = 2.0;    // V

    friend bool operator==(const RadioProfile&, const RadioProfile&) = default;
};

/// Per-event processing times on the 1 MHz PIC18F46J50.
struct TimingProfile {
    double fifo_optimized = 0.000630;   // accumulator-balanced FIFO update
    double ai_sum_optimized = 0.000346; // summing five weights
    double fifo_naive = 0.0385;         // traversing 1800 slots
    double nb_naive = 0.01753;          // unsimplified naive Bayes

    friend bool operator==(const TimingProfile&, const TimingProfile&) = default;
};

struct McuProfile {
    double run_current = 0.0012;  // A while running, 0 when idle
    double supply_voltage = 2.0;  // V
    TimingProfile timing;

    friend bool operator==(const McuProfile&, const McuProfile&) = default;
};

struct BatteryProfile {
    double capacity = 0.675;  // J

    friend bool operator==(const BatteryProfile&, const BatteryProfile&) = default;
};

struct EnergyProfiles {
    RadioProfile radio;
    McuProfile mcu;
    BatteryProfile battery;

    /// Throws InvalidConfig when any field violates its sign constraint.
    void validate() const;

    friend bool operator==(const EnergyProfiles&, const EnergyProfiles&) = default;
};

double tx_event_energy(const RadioProfile& radio);

double mcu_event_energy(const McuProfile& mcu, double processing_time);

/// Optimized phases are replaced by their naive counterparts additively.
double per_event_processing_time(const TimingProfile& timing, bool buffer_optimized, bool algorithm_optimized);

double daily_energy_tx_all(double events_per_day, const RadioProfile& radio);

struct EnergyBreakdown {
    double processing = 0.0;
    double transmit = 0.0;

    double total() const { return processing + transmit; }
    friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

EnergyBreakdown daily_energy_so(double events_per_day, double actions_per_day, const McuProfile& mcu,
                                const RadioProfile& radio, double processing_time);

struct BatteryLifetime {
    double days = 0.0;
    double batteries_per_day = 0.0;
};

/// Throws ZeroConsumption when daily_energy is 0.
BatteryLifetime battery_lifetime(double daily_energy, const BatteryProfile& battery);

struct CpuLoad {
    double fraction = 0.0;  // capped at 1.0
    bool overload = false;
};

CpuLoad cpu_load(double events_per_second, double processing_time);

/// Percentage saved by `candidate` relative to `baseline`. Throws ZeroBaseline.
double savings(double baseline, double candidate);

/// Key-value form of every profile field, with a comment per constant.
std::string profiles_to_config_text(const EnergyProfiles& profiles);
std::string profiles_to_json_text(const EnergyProfiles& profiles);

/// Accepts either the key-value form or a JSON object with the same keys.
/// Keys not present keep their defaults; unknown keys are rejected.
EnergyProfiles parse_profiles(std::istream& in);
EnergyProfiles load_profiles(const std::string& path);

}  // namespace sosim
