#include "sosim/energy.hpp"

#include "sosim/key_value.hpp"
#include "sosim/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

namespace sosim {

double tx_event_energy(const RadioProfile& r) {
    const double charge = r.csma_current * r.csma_duration + r.wake_current * r.wake_duration +
                          r.tx_current * r.tx_duration;
    return charge * r.supply_voltage;
}

double mcu_event_energy(const McuProfile& mcu, double processing_time) {
    return mcu.run_current * processing_time * mcu.supply_voltage;
}

double per_event_processing_time(const TimingProfile& t, bool buffer_optimized, bool algorithm_optimized) {
    return (buffer_optimized ? t.fifo_optimized : t.fifo_naive) + (algorithm_optimized ? t.ai_sum_optimized : t.nb_naive);
}

double daily_energy_tx_all(double events_per_day, const RadioProfile& radio) {
    return events_per_day * tx_event_energy(radio);
}

EnergyBreakdown daily_energy_so(double events_per_day, double actions_per_day, const McuProfile& mcu,
                                const RadioProfile& radio, double processing_time) {
    return {events_per_day * mcu_event_energy(mcu, processing_time), actions_per_day * tx_event_energy(radio)};
}

BatteryLifetime battery_lifetime(double daily_energy, const BatteryProfile& battery) {
    if (daily_energy == 0.0) throw ZeroConsumption();
    return {battery.capacity / daily_energy, daily_energy / battery.capacity};
}

CpuLoad cpu_load(double events_per_second, double processing_time) {
    const double raw = events_per_second * processing_time;
    return {raw > 1.0 ? 1.0 : raw, raw > 1.0};
}

double savings(double baseline, double candidate) {
    if (baseline == 0.0) throw ZeroBaseline();
    return 100.0 * (1.0 - candidate / baseline);
}

// ---------------------------------------------------------------------------
// Profile files. Every constant is listed once here.

namespace {

struct Field {
    const char* group;
    const char* name;
    double& (*ref)(EnergyProfiles&);
    bool strictly_positive;
    const char* note;
};

#define SOSIM_FIELD(group, path, name, positive, note) \
    Field { group, name, [](EnergyProfiles& p) -> double& { return p.path; }, positive, note }

const std::array<Field, 14> kFields{{
    SOSIM_FIELD("radio", radio.csma_current, "csma_current", false, "A, CC2420 carrier-sense (CSMA) current"),
    SOSIM_FIELD("radio", radio.csma_duration, "csma_duration", false, "s, CSMA sequence length"),
    SOSIM_FIELD("radio", radio.wake_current, "wake_current", false, "A, node microcontroller wake-up current"),
    SOSIM_FIELD("radio", radio.wake_duration, "wake_duration", false, "s, wake-up duration"),
    SOSIM_FIELD("radio", radio.tx_current, "tx_current", false, "A, transmit current"),
    SOSIM_FIELD("radio", radio.tx_duration, "tx_duration", false, "s, on-air time of a 3-byte identity frame"),
    SOSIM_FIELD("radio", radio.supply_voltage, "supply_voltage", false, "V, minimum CC2420 operating voltage"),
    SOSIM_FIELD("mcu", mcu.run_current, "run_current", false, "A, PIC18F46J50 at 1 MHz while running"),
    SOSIM_FIELD("mcu", mcu.supply_voltage, "supply_voltage", false, "V"),
    SOSIM_FIELD("timing", mcu.timing.fifo_optimized, "fifo_optimized", true, "s, accumulator FIFO update per event"),
    SOSIM_FIELD("timing", mcu.timing.ai_sum_optimized, "ai_sum_optimized", true, "s, summing five integer weights"),
    SOSIM_FIELD("timing", mcu.timing.fifo_naive, "fifo_naive", true, "s, traversing all 1800 buffer slots"),
    SOSIM_FIELD("timing", mcu.timing.nb_naive, "nb_naive", true, "s, unsimplified naive Bayes evaluation"),
    SOSIM_FIELD("battery", battery.capacity, "capacity", true, "J, CR2032 energy budget"),
}};

#undef SOSIM_FIELD

std::string shortest(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

const Field& find_field(const std::string& key) {
    for (const auto& f : kFields)
        if (key == std::string(f.group) + "." + f.name) return f;
    throw InvalidConfig("unknown profile key '" + key + "'");
}

}  // namespace

void EnergyProfiles::validate() const {
    auto copy = *this;
    for (const auto& f : kFields) {
        const double v = f.ref(copy);
        if (f.strictly_positive ? !(v > 0.0) : !(v >= 0.0))
            throw InvalidConfig(std::string(f.group) + "." + f.name + (f.strictly_positive ? " must be > 0" : " must be >= 0"));
    }
}

std::string profiles_to_config_text(const EnergyProfiles& profiles) {
    auto copy = profiles;
    std::ostringstream out;
    const char* group = "";
    for (const auto& f : kFields) {
        if (std::string_view(group) != f.group) {
            out << (*group ? "\n" : "") << "# " << f.group << '\n';
            group = f.group;
        }
        out << f.group << '.' << f.name << " = " << shortest(f.ref(copy)) << "  # " << f.note << '\n';
    }
    return out.str();
}

std::string profiles_to_json_text(const EnergyProfiles& profiles) {
    auto copy = profiles;
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : kFields) j[f.group][f.name] = f.ref(copy);
    return j.dump(2) + "\n";
}

EnergyProfiles parse_profiles(std::istream& in) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EnergyProfiles p;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidConfig(std::string("profile JSON: ") + e.what());
        }
        for (const auto& [group, members] : j.items()) {
            if (!members.is_object()) throw InvalidConfig("profile group '" + group + "' must be an object");
            for (const auto& [name, value] : members.items()) {
                if (!value.is_number()) throw InvalidConfig("profile key '" + group + "." + name + "' must be numeric");
                find_field(group + "." + name).ref(p) = value.get<double>();
            }
        }
    } else {
        std::istringstream lines(text);
        for (const auto& kv : parse_key_values(lines)) find_field(kv.key).ref(p) = parse_double(kv);
    }
    p.validate();
    return p;
}

EnergyProfiles load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open profile '" + path + "'");
    return parse_profiles(in);
}

}  // namespace sosim
