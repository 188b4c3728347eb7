#pragma once

#include "polysim/kernel/simtime.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace polysim {

enum class ParamType { Int, Double, String, Bool, Time };

const char* to_string(ParamType type) noexcept;

/// A resolved module parameter value.
class ParamValue {
public:
    using Storage = std::variant<std::int64_t, double, std::string, bool, SimTime>;

    ParamValue() = default;
    ParamValue(std::int64_t v) : value_(v) {}
    ParamValue(int v) : value_(static_cast<std::int64_t>(v)) {}
    ParamValue(double v) : value_(v) {}
    ParamValue(std::string v) : value_(std::move(v)) {}
    ParamValue(const char* v) : value_(std::string(v)) {}
    ParamValue(bool v) : value_(v) {}
    ParamValue(SimTime v) : value_(v) {}

    ParamType type() const noexcept;
    const Storage& storage() const noexcept { return value_; }

    std::int64_t as_int() const;
    /// Accepts int values too.
    double as_double() const;
    const std::string& as_string() const;
    bool as_bool() const;
    SimTime as_time() const;

    /// Literal form as it would appear in a topology or config file.
    std::string literal() const;

    friend bool operator==(const ParamValue&, const ParamValue&) = default;

private:
    Storage value_;
};

} // namespace polysim
