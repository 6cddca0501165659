#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sosim {

/// One `key = value` line; `line` is 1-based.
struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Reads `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Throws InvalidConfig on a non-blank line without '='.
std::vector<KeyValue> parse_key_values(std::istream& in);

double parse_double(const KeyValue& kv);
long long parse_integer(const KeyValue& kv);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char separator);

}  // namespace sosim
