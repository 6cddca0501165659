#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sosim {

/// Dense column vector over an arbitrary scalar.
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CountVector = Vector<std::uint32_t>;

/// Dense sensor index assigned by a log's registry (or local to a smart object).
using SensorIndex = std::int32_t;

/// One window slot: the sensor that fired during that second, or empty.
using Entry = std::optional<SensorIndex>;

/// Whole seconds since the (naive, local-time) epoch.
using Tick = std::int64_t;

inline constexpr Tick kSecondsPerDay = 86400;
inline constexpr Tick kSecondsPerHour = 3600;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyTrace : public Error {
public:
    EmptyTrace() : Error("trace contains no usable records") {}
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class IdentityOverflow : public Error {
public:
    explicit IdentityOverflow(std::int64_t index)
        : Error("sensor index " + std::to_string(index) + " does not fit a 3-byte identity") {}
};

class UnregisteredSensor : public Error {
public:
    explicit UnregisteredSensor(std::int64_t index)
        : Error("sensor " + std::to_string(index) + " is not wired to this smart object") {}
};

class UnknownAction : public Error {
public:
    explicit UnknownAction(const std::string& name) : Error("unknown action '" + name + "'") {}
};

class ZeroConsumption : public Error {
public:
    ZeroConsumption() : Error("daily energy is zero; battery lifetime is undefined") {}
};

class ZeroBaseline : public Error {
public:
    ZeroBaseline() : Error("baseline energy is zero; savings are undefined") {}
};

class MismatchedSpan : public Error {
public:
    MismatchedSpan() : Error("runs cover different durations") {}
};

}  // namespace sosim
