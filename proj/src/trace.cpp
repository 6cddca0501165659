#include "sosim/trace.hpp"

#include "sosim/key_value.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace sosim {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

std::optional<std::int64_t> try_parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{to_int(y)}, std::chrono::month{unsigned(to_int(m))},
                                          std::chrono::day{unsigned(to_int(d))}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;
}

// HH:MM:SS[.f{1,6}] -> (seconds of day, micros)
std::optional<std::pair<std::int64_t, std::int32_t>> try_parse_time(std::string_view text) {
    if (text.size() < 8 || text[2] != ':' || text[5] != ':') return std::nullopt;
    const auto h = text.substr(0, 2), m = text.substr(3, 2), s = text.substr(6, 2);
    if (!all_digits(h) || !all_digits(m) || !all_digits(s)) return std::nullopt;
    const int hh = to_int(h), mm = to_int(m), ss = to_int(s);
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    std::int32_t micros = 0;
    if (text.size() > 8) {
        if (text[8] != '.') return std::nullopt;
        const auto frac = text.substr(9);
        if (frac.empty() || frac.size() > 6 || !all_digits(frac)) return std::nullopt;
        micros = to_int(frac);
        for (std::size_t i = frac.size(); i < 6; ++i) micros *= 10;
    }
    return std::pair{std::int64_t{hh} * 3600 + mm * 60 + ss, micros};
}

std::vector<std::string_view> fields_of(std::string_view text) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
        if (i == text.size()) break;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r') ++j;
        fields.push_back(text.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool blank(std::string_view text) {
    return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

std::int64_t parse_date(std::string_view text) {
    auto v = try_parse_date(text);
    if (!v) throw InvalidConfig("invalid date '" + std::string(text) + "'");
    return *v;
}

std::string format_timestamp(const Timestamp& ts) {
    const std::int64_t day = ts.seconds >= 0 ? ts.seconds / kSecondsPerDay
                                             : (ts.seconds - kSecondsPerDay + 1) / kSecondsPerDay;
    const std::int64_t sod = ts.seconds - day * kSecondsPerDay;
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()), int(sod / 3600), int(sod / 60 % 60), int(sod % 60));
    std::string out(buf);
    if (ts.micros != 0) {
        std::snprintf(buf, sizeof buf, ".%06d", int(ts.micros));
        out += buf;
    }
    return out;
}

RawRecord parse_line(std::string_view text, std::size_t line_number) {
    const auto fields = fields_of(text);
    if (fields.size() < 4) throw MalformedLine(line_number, "expected at least 4 fields");
    if (fields.size() == 5) throw MalformedLine(line_number, "activity without begin/end marker");
    if (fields.size() > 6) throw MalformedLine(line_number, "too many fields");

    const auto date = try_parse_date(fields[0]);
    const auto time = try_parse_time(fields[1]);
    if (!date || !time) throw MalformedLine(line_number, "unparseable timestamp");

    RawRecord record;
    record.timestamp = Timestamp{*date + time->first, time->second};
    record.sensor_id = std::string(fields[2]);
    record.value = std::string(fields[3]);
    if (fields.size() == 6) {
        Annotation a;
        a.activity = std::string(fields[4]);
        if (fields[5] == "begin")
            a.marker = Marker::Begin;
        else if (fields[5] == "end")
            a.marker = Marker::End;
        else
            throw MalformedLine(line_number, "marker must be 'begin' or 'end'");
        record.annotation = std::move(a);
    }
    return record;
}

std::string to_line(const RawRecord& record) {
    std::string out = format_timestamp(record.timestamp);
    out += ' ';
    out += record.sensor_id;
    out += ' ';
    out += record.value;
    if (record.annotation) {
        out += ' ';
        out += record.annotation->activity;
        out += record.annotation->marker == Marker::Begin ? " begin" : " end";
    }
    return out;
}

std::int64_t EventLog::span_micros() const {
    if (records.empty()) return 0;
    return last().total_micros() - first().total_micros();
}

double EventLog::span_days() const {
    return static_cast<double>(span_micros()) / 86'400'000'000.0;
}

SensorIndex EventLog::index_of(const std::string& sensor_id) const {
    const auto it = registry.find(sensor_id);
    if (it == registry.end()) throw InvalidConfig("unknown sensor '" + sensor_id + "'");
    return it->second;
}

EventLog make_event_log(std::vector<RawRecord> records) {
    EventLog log;
    for (const auto& r : records) {
        if (log.registry.emplace(r.sensor_id, static_cast<SensorIndex>(log.sensor_names.size())).second)
            log.sensor_names.push_back(r.sensor_id);
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });
    log.records = std::move(records);
    return log;
}

std::vector<ActionInterval> extract_intervals(const EventLog& log, std::vector<Diagnostic>* diagnostics) {
    auto warn = [&](std::string msg) {
        if (diagnostics) diagnostics->push_back({0, std::move(msg)});
    };
    std::vector<ActionInterval> out;
    std::map<std::string, std::size_t> open;  // activity -> index into out
    for (const auto& r : log.records) {
        if (!r.annotation) continue;
        const auto& name = r.annotation->activity;
        const Tick t = r.timestamp.tick();
        if (r.annotation->marker == Marker::Begin) {
            if (open.contains(name)) {
                warn("repeated begin for '" + name + "' at " + format_timestamp(r.timestamp) + " ignored");
                continue;
            }
            open.emplace(name, out.size());
            out.push_back({name, t, t, false});
        } else {
            const auto it = open.find(name);
            if (it == open.end()) {
                warn("end without begin for '" + name + "' at " + format_timestamp(r.timestamp) + " ignored");
                continue;
            }
            out[it->second].end = t;
            open.erase(it);
        }
    }
    for (const auto& [name, idx] : open) {
        out[idx].end = log.last().tick();
        out[idx].closed_at_trace_end = true;
        warn("begin for '" + name + "' never ended; closed at trace end");
    }
    return out;
}

LoadResult load_trace(std::istream& in) {
    LoadResult result;
    std::vector<RawRecord> records;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (blank(line)) continue;
        try {
            records.push_back(parse_line(line, number));
        } catch (const MalformedLine& e) {
            ++result.malformed_lines;
            result.diagnostics.push_back({number, e.what()});
        }
    }
    if (in.bad()) throw IoFailure("read error after line " + std::to_string(number));
    if (records.empty()) throw EmptyTrace();
    result.log = make_event_log(std::move(records));
    result.intervals = extract_intervals(result.log, &result.diagnostics);
    return result;
}

LoadResult load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open trace '" + path + "'");
    return load_trace(in);
}

void write_trace(std::ostream& out, const EventLog& log) {
    for (const auto& r : log.records) out << to_line(r) << '\n';
    if (!out) throw IoFailure("write failed");
}

SensorSubset resolve_subset(const EventLog& log, const std::vector<std::string>& names) {
    SensorSubset subset;
    for (const auto& n : names) subset.insert(log.index_of(n));
    return subset;
}

EventRate daily_event_rate(const EventLog& log, const SensorSubset& subset) {
    if (log.empty()) throw EmptyTrace();
    EventRate rate;
    rate.span_micros = log.span_micros();
    if (rate.span_micros < 1'000'000) throw std::invalid_argument("trace spans less than one second");
    for (const auto& r : log.records)
        if (subset.contains(log.index_of(r))) ++rate.events;
    return rate;
}

std::uint64_t HourlyHistogram::total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

HourlyHistogram hourly_histogram(const EventLog& log, const SensorSubset& subset) {
    if (log.empty()) throw EmptyTrace();
    if (log.span_micros() < 1'000'000) throw std::invalid_argument("trace spans less than one second");
    HourlyHistogram h;
    auto day_of = [](Tick t) { return t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay; };
    h.days = day_of(log.last().tick()) - day_of(log.first().tick()) + 1;
    for (const auto& r : log.records)
        if (subset.contains(log.index_of(r))) ++h.counts[hour_of_day(r.timestamp.tick())];
    return h;
}

// ---------------------------------------------------------------------------

void SyntheticConfig::validate() const {
    if (duration_days <= 0) throw InvalidConfig("duration_days must be positive");
    if (sensors <= 0) throw InvalidConfig("sensors must be positive");
    if (sensors >= (1 << 24)) throw InvalidConfig("sensors must fit a 3-byte identity");
    if (!(background_rate >= 0.0)) throw InvalidConfig("background_rate must be non-negative");
    if (active_hour_begin < 0 || active_hour_end > 24 || active_hour_begin >= active_hour_end)
        throw InvalidConfig("active hours must satisfy 0 <= begin < end <= 24");
    if (!try_parse_date(start_date)) throw InvalidConfig("invalid start_date '" + start_date + "'");
    std::set<std::string> names;
    for (const auto& p : action_patterns) {
        if (p.name.empty() || p.name.find_first_of(" \t") != std::string::npos)
            throw InvalidConfig("action names must be non-empty without whitespace");
        if (!names.insert(p.name).second) throw InvalidConfig("duplicate action '" + p.name + "'");
        if (!(p.mean_daily >= 0.0)) throw InvalidConfig("action '" + p.name + "': mean_daily must be non-negative");
        if (p.burst_length == 0) throw InvalidConfig("action '" + p.name + "': burst length must be positive");
        if (p.sensors.empty()) throw InvalidConfig("action '" + p.name + "': empty sensor subset");
        for (auto s : p.sensors)
            if (s < 0 || s >= sensors)
                throw InvalidConfig("action '" + p.name + "': sensor " + std::to_string(s) + " not declared");
    }
}

SyntheticConfig parse_synthetic_config(std::istream& in) {
    SyntheticConfig cfg;
    for (const auto& kv : parse_key_values(in)) {
        if (kv.key == "duration_days")
            cfg.duration_days = parse_integer(kv);
        else if (kv.key == "sensors")
            cfg.sensors = static_cast<std::int32_t>(parse_integer(kv));
        else if (kv.key == "background_rate")
            cfg.background_rate = parse_double(kv);
        else if (kv.key == "seed")
            cfg.seed = static_cast<std::uint64_t>(parse_integer(kv));
        else if (kv.key == "active_hours") {
            const auto parts = split(kv.value, '-');
            if (parts.size() != 2) throw InvalidConfig("active_hours expects 'begin-end'");
            cfg.active_hour_begin = static_cast<int>(parse_integer({kv.key, parts[0], kv.line}));
            cfg.active_hour_end = static_cast<int>(parse_integer({kv.key, parts[1], kv.line}));
        } else if (kv.key == "start_date")
            cfg.start_date = kv.value;
        else if (kv.key == "action") {
            // action = NAME; sensors=0,1,2; daily=7; burst=12
            const auto parts = split(kv.value, ';');
            ActionPattern p;
            p.name = parts.at(0);
            for (std::size_t i = 1; i < parts.size(); ++i) {
                const auto eq = parts[i].find('=');
                if (eq == std::string::npos)
                    throw InvalidConfig("line " + std::to_string(kv.line) + ": expected field=value in action");
                const KeyValue field{trim(parts[i].substr(0, eq)), trim(parts[i].substr(eq + 1)), kv.line};
                if (field.key == "sensors") {
                    for (const auto& s : split(field.value, ','))
                        p.sensors.push_back(static_cast<SensorIndex>(parse_integer({field.key, s, kv.line})));
                } else if (field.key == "daily")
                    p.mean_daily = parse_double(field);
                else if (field.key == "burst")
                    p.burst_length = static_cast<std::uint32_t>(parse_integer(field));
                else
                    throw InvalidConfig("line " + std::to_string(kv.line) + ": unknown action field '" + field.key + "'");
            }
            cfg.action_patterns.push_back(std::move(p));
        } else
            throw InvalidConfig("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
    cfg.validate();
    return cfg;
}

SyntheticConfig load_synthetic_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open synthetic config '" + path + "'");
    return parse_synthetic_config(in);
}

std::string to_config_text(const SyntheticConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "duration_days = " << c.duration_days << '\n'
        << "sensors = " << c.sensors << '\n'
        << "background_rate = " << c.background_rate << '\n'
        << "seed = " << c.seed << '\n'
        << "active_hours = " << c.active_hour_begin << '-' << c.active_hour_end << '\n'
        << "start_date = " << c.start_date << '\n';
    for (const auto& p : c.action_patterns) {
        out << "action = " << p.name << "; sensors=";
        for (std::size_t i = 0; i < p.sensors.size(); ++i) out << (i ? "," : "") << p.sensors[i];
        out << "; daily=" << p.mean_daily << "; burst=" << p.burst_length << '\n';
    }
    return out.str();
}

namespace {

std::string sensor_name(SensorIndex i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%03d", int(i));
    return buf;
}

}  // namespace

SyntheticTrace generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    const std::int64_t origin = parse_date(config.start_date);
    std::uniform_int_distribution<std::int32_t> micros_dist(0, 999'999);
    std::uniform_int_distribution<int> off_delay(1, 3);
    std::uniform_int_distribution<int> burst_gap(5, 30);

    std::vector<RawRecord> records;
    SyntheticTrace out;

    auto emit = [&](std::int64_t second, SensorIndex s, std::optional<Annotation> on_note,
                    std::optional<Annotation> off_note) {
        const std::int64_t on = origin + second;
        records.push_back({{on, micros_dist(rng)}, sensor_name(s), "ON", std::move(on_note)});
        const std::int64_t off = on + off_delay(rng);
        records.push_back({{off, micros_dist(rng)}, sensor_name(s), "OFF", std::move(off_note)});
        return off;
    };

    const std::int64_t window_lo = std::int64_t{config.active_hour_begin} * kSecondsPerHour;
    const std::int64_t window_hi = std::int64_t{config.active_hour_end} * kSecondsPerHour;
    for (const auto& pattern : config.action_patterns) {
        std::int64_t previous_end = -kSecondsPerDay;
        std::uniform_int_distribution<std::size_t> pick(0, pattern.sensors.size() - 1);
        for (std::int64_t day = 0; day < config.duration_days; ++day) {
            std::uint64_t occurrences = 0;
            if (pattern.mean_daily > 0.0) occurrences = std::poisson_distribution<std::uint64_t>(pattern.mean_daily)(rng);
            std::uniform_int_distribution<std::int64_t> start_dist(window_lo, window_hi - 1);
            std::vector<std::int64_t> starts(occurrences);
            for (auto& s : starts) s = day * kSecondsPerDay + start_dist(rng);
            std::sort(starts.begin(), starts.end());
            for (auto start : starts) {
                start = std::max(start, previous_end + 60);
                std::int64_t t = start;
                std::int64_t last_off = 0;
                for (std::uint32_t j = 0; j < pattern.burst_length; ++j) {
                    const bool first = j == 0, final = j + 1 == pattern.burst_length;
                    const auto s = pattern.sensors[pick(rng)];
                    last_off = emit(t, s, first ? std::optional<Annotation>({pattern.name, Marker::Begin}) : std::nullopt,
                                    final ? std::optional<Annotation>({pattern.name, Marker::End}) : std::nullopt);
                    t += burst_gap(rng);
                }
                out.truth.push_back({pattern.name, origin + start, last_off, false});
                previous_end = last_off - origin;
            }
        }
    }

    if (config.background_rate > 0.0) {
        const std::int64_t horizon = config.duration_days * kSecondsPerDay;
        std::uniform_int_distribution<std::int64_t> when(0, horizon - 1);
        for (SensorIndex s = 0; s < config.sensors; ++s) {
            const double mean = config.background_rate * 24.0 * static_cast<double>(config.duration_days);
            const auto count = std::poisson_distribution<std::uint64_t>(mean)(rng);
            for (std::uint64_t k = 0; k < count; ++k) emit(when(rng), s, std::nullopt, std::nullopt);
        }
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });
    out.log.records = std::move(records);
    for (SensorIndex s = 0; s < config.sensors; ++s) {
        out.log.sensor_names.push_back(sensor_name(s));
        out.log.registry.emplace(sensor_name(s), s);
    }
    std::sort(out.truth.begin(), out.truth.end(),
              [](const ActionInterval& a, const ActionInterval& b) { return a.begin < b.begin; });
    return out;
}

}  // namespace sosim
