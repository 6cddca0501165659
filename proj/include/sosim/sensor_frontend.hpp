#pragma once

#include "sosim/trace.hpp"

#include <array>

namespace sosim {

inline constexpr std::int64_t kIdentityLimit = std::int64_t{1} << 24;

/// A sensor activation quantized to a whole-second tick.
struct SensorEvent {
    Tick tick = 0;
    SensorIndex sensor_index = 0;

    friend auto operator<=>(const SensorEvent&, const SensorEvent&) = default;
};

struct ImpulseStream {
    std::vector<SensorEvent> events;  // ordered by (tick, sensor_index), unique
    std::uint64_t dropped_off_events = 0;
    std::uint64_t merged_duplicates = 0;
    Timestamp first;                  // span of the source log
    Timestamp last;

    double span_days() const {
        return static_cast<double>(last.total_micros() - first.total_micros()) / 86'400'000'000.0;
    }
};

/// True for "ON" (any case) or a numeric value greater than zero.
bool is_on_value(std::string_view value);

/// 1 Hz, on-event-only view of the subset's records. Sensor indices are the
/// log's registry indices. Throws EmptyTrace for an empty log and
/// InvalidConfig when the subset names an index outside the registry.
ImpulseStream quantize(const EventLog& log, const SensorSubset& subset);

/// Rebuilds a log holding one "ON" record per impulse event.
EventLog to_event_log(const ImpulseStream& stream, const std::vector<std::string>& sensor_names);

using IdentityBytes = std::array<std::uint8_t, 3>;

/// Big-endian 3-byte payload. Throws IdentityOverflow outside [0, 2^24).
IdentityBytes encode_identity(std::int64_t sensor_index);
SensorIndex decode_identity(const IdentityBytes& bytes);

}  // namespace sosim
