#include "sosim/key_value.hpp"

#include "sosim/types.hpp"

#include <charconv>
#include <istream>

namespace sosim {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char separator) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(separator, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<KeyValue> parse_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        const std::string body = trim(view);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("line " + std::to_string(number) + ": expected 'key = value'");
        KeyValue kv{trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)),
                    number};
        if (kv.key.empty()) throw InvalidConfig("line " + std::to_string(number) + ": empty key");
        out.push_back(std::move(kv));
    }
    return out;
}

double parse_double(const KeyValue& kv) {
    double value = 0.0;
    const char* end = kv.value.data() + kv.value.size();
    auto [ptr, ec] = std::from_chars(kv.value.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw InvalidConfig("line " + std::to_string(kv.line) + ": '" + kv.key + "' expects a number");
    return value;
}

long long parse_integer(const KeyValue& kv) {
    long long value = 0;
    const char* end = kv.value.data() + kv.value.size();
    auto [ptr, ec] = std::from_chars(kv.value.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw InvalidConfig("line " + std::to_string(kv.line) + ": '" + kv.key + "' expects an integer");
    return value;
}

}  // namespace sosim
