#pragma once

#include "sosim/types.hpp"

#include <array>
#include <compare>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sosim {

/// Naive local date-time with microsecond resolution.
struct Timestamp {
    std::int64_t seconds = 0;  // since 1970-01-01 00:00:00
    std::int32_t micros = 0;   // [0, 1e6)

    Tick tick() const noexcept { return seconds; }
    std::int64_t total_micros() const noexcept { return seconds * 1'000'000 + micros; }

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// "YYYY-MM-DD HH:MM:SS[.ffffff]"; fractional part printed only when non-zero.
std::string format_timestamp(const Timestamp& ts);

enum class Marker { Begin, End };

struct Annotation {
    std::string activity;
    Marker marker = Marker::Begin;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// One line of a CASAS-style event log.
struct RawRecord {
    Timestamp timestamp;
    std::string sensor_id;
    std::string value;
    std::optional<Annotation> annotation;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Parses one log line. Throws MalformedLine carrying `line_number`.
RawRecord parse_line(std::string_view text, std::size_t line_number = 0);

/// Canonical single-line form; parse_line(to_line(r)) == r.
std::string to_line(const RawRecord& record);

struct EventLog {
    std::vector<RawRecord> records;             // non-decreasing by timestamp
    std::vector<std::string> sensor_names;      // index -> sensor_id
    std::map<std::string, SensorIndex> registry;  // sensor_id -> index

    bool empty() const noexcept { return records.empty(); }
    Timestamp first() const { return records.front().timestamp; }
    Timestamp last() const { return records.back().timestamp; }
    std::int64_t span_micros() const;
    double span_days() const;

    /// Index of `sensor_id`; throws InvalidConfig when unknown.
    SensorIndex index_of(const std::string& sensor_id) const;
    SensorIndex index_of(const RawRecord& record) const { return registry.at(record.sensor_id); }
};

/// One annotated occurrence of an activity, closed by its end marker.
struct ActionInterval {
    std::string action;
    Tick begin = 0;
    Tick end = 0;
    bool closed_at_trace_end = false;

    friend bool operator==(const ActionInterval&, const ActionInterval&) = default;
};

struct Diagnostic {
    std::size_t line = 0;  // 0 when not tied to an input line
    std::string message;
};

struct LoadResult {
    EventLog log;
    std::vector<ActionInterval> intervals;
    std::vector<Diagnostic> diagnostics;
    std::size_t malformed_lines = 0;
};

/// Builds a log from records: stable-sorts by timestamp and registers sensors
/// in first-appearance order of the input sequence.
EventLog make_event_log(std::vector<RawRecord> records);

/// Pairs begin/end markers per activity. Unclosed begins are closed at the
/// last record and flagged; stray ends and repeated begins are flagged.
std::vector<ActionInterval> extract_intervals(const EventLog& log,
                                              std::vector<Diagnostic>* diagnostics = nullptr);

/// Reads a whole trace. Malformed lines are skipped and reported; blank lines
/// are ignored. Throws EmptyTrace when nothing parses, IoFailure on stream errors.
LoadResult load_trace(std::istream& in);
LoadResult load_trace_file(const std::string& path);

/// Writes the log in canonical line form.
void write_trace(std::ostream& out, const EventLog& log);

using SensorSubset = std::set<SensorIndex>;

/// Resolves sensor names against the registry. Throws InvalidConfig on unknown names.
SensorSubset resolve_subset(const EventLog& log, const std::vector<std::string>& names);

/// Exact events/day: events over the log span.
struct EventRate {
    std::uint64_t events = 0;
    std::int64_t span_micros = 0;

    double per_day() const {
        return static_cast<double>(events) * 86'400'000'000.0 / static_cast<double>(span_micros);
    }
};

/// Counts records of `subset` sensors (every record, regardless of value).
/// Throws EmptyTrace for an empty log and std::invalid_argument for a span under one second.
EventRate daily_event_rate(const EventLog& log, const SensorSubset& subset);

/// Per-hour event counts averaged over the calendar days the log touches.
struct HourlyHistogram {
    std::array<std::uint64_t, 24> counts{};
    std::int64_t days = 0;

    double mean(std::size_t hour) const {
        return static_cast<double>(counts.at(hour)) / static_cast<double>(days);
    }
    std::uint64_t total() const;
};

HourlyHistogram hourly_histogram(const EventLog& log, const SensorSubset& subset);

/// Hour of day [0, 24) of a tick.
inline int hour_of_day(Tick tick) {
    Tick s = tick % kSecondsPerDay;
    if (s < 0) s += kSecondsPerDay;
    return static_cast<int>(s / kSecondsPerHour);
}

// ---------------------------------------------------------------------------
// Synthetic traces

struct ActionPattern {
    std::string name;
    std::vector<SensorIndex> sensors;
    double mean_daily = 0.0;
    std::uint32_t burst_length = 1;
};

struct SyntheticConfig {
    std::int64_t duration_days = 1;
    std::int32_t sensors = 1;
    std::vector<ActionPattern> action_patterns;
    double background_rate = 0.0;  // events per hour per sensor
    std::uint64_t seed = 0;
    int active_hour_begin = 7;     // occurrences start within [begin, end)
    int active_hour_end = 21;
    std::string start_date = "2009-10-16";

    /// Throws InvalidConfig describing the first violated constraint.
    void validate() const;
};

/// Reads the key-value synthetic config format (see README).
SyntheticConfig parse_synthetic_config(std::istream& in);
SyntheticConfig load_synthetic_config(const std::string& path);
std::string to_config_text(const SyntheticConfig& config);

struct SyntheticTrace {
    EventLog log;                         // may be empty
    std::vector<ActionInterval> truth;    // ground-truth action intervals
};

/// Deterministic for a fixed config (seed included). Sensor i is named
/// "S###" and registered at index i.
SyntheticTrace generate_synthetic(const SyntheticConfig& config);

/// Parses "YYYY-MM-DD" into seconds at midnight.
std::int64_t parse_date(std::string_view text);

}  // namespace sosim
