#include "sosim/sensor_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace sosim {

bool is_on_value(std::string_view value) {
    if (value.size() == 2 && std::toupper(static_cast<unsigned char>(value[0])) == 'O' &&
        std::toupper(static_cast<unsigned char>(value[1])) == 'N')
        return true;
    double numeric = 0.0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, numeric);
    return ec == std::errc() && ptr == end && numeric > 0.0;
}

ImpulseStream quantize(const EventLog& log, const SensorSubset& subset) {
    if (log.empty()) throw EmptyTrace();
    for (auto s : subset)
        if (s < 0 || s >= static_cast<SensorIndex>(log.sensor_names.size()))
            throw InvalidConfig("sensor index " + std::to_string(s) + " is not in the registry");

    ImpulseStream stream;
    stream.first = log.first();
    stream.last = log.last();
    for (const auto& r : log.records) {
        const auto index = log.index_of(r);
        if (!subset.contains(index)) continue;
        if (!is_on_value(r.value)) {
            ++stream.dropped_off_events;
            continue;
        }
        stream.events.push_back({r.timestamp.tick(), index});
    }
    std::sort(stream.events.begin(), stream.events.end());
    const auto tail = std::unique(stream.events.begin(), stream.events.end());
    stream.merged_duplicates = static_cast<std::uint64_t>(stream.events.end() - tail);
    stream.events.erase(tail, stream.events.end());
    return stream;
}

EventLog to_event_log(const ImpulseStream& stream, const std::vector<std::string>& sensor_names) {
    EventLog log;
    log.sensor_names = sensor_names;
    for (std::size_t i = 0; i < sensor_names.size(); ++i)
        log.registry.emplace(sensor_names[i], static_cast<SensorIndex>(i));
    log.records.reserve(stream.events.size());
    for (const auto& e : stream.events)
        log.records.push_back({{e.tick, 0}, sensor_names.at(static_cast<std::size_t>(e.sensor_index)), "ON", {}});
    return log;
}

IdentityBytes encode_identity(std::int64_t sensor_index) {
    if (sensor_index < 0 || sensor_index >= kIdentityLimit) throw IdentityOverflow(sensor_index);
    const auto v = static_cast<std::uint32_t>(sensor_index);
    return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

SensorIndex decode_identity(const IdentityBytes& bytes) {
    return static_cast<SensorIndex>((std::uint32_t{bytes[0]} << 16) | (std::uint32_t{bytes[1]} << 8) | bytes[2]);
}

}  // namespace sosim
