#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace polysim {

/// Simulated time as an integer count of picoseconds.
///
/// Arithmetic is overflow-checked and throws SimError(TimeOverflow) instead of
/// wrapping. Text forms are exact: no floating point is involved in parsing or
/// printing, so parse_seconds(t.str()) == t for every representable t.
class SimTime {
public:
    static constexpr std::int64_t kTicksPerSecond = 1'000'000'000'000;
    static constexpr int kScaleExponent = 12;

    constexpr SimTime() noexcept = default;

    static constexpr SimTime from_ticks(std::int64_t ticks) noexcept {
        SimTime t;
        t.ticks_ = ticks;
        return t;
    }
    static constexpr SimTime zero() noexcept { return {}; }
    static constexpr SimTime max() noexcept {
        return from_ticks(std::numeric_limits<std::int64_t>::max());
    }

    static SimTime seconds(std::int64_t s);
    static SimTime millis(std::int64_t ms);
    static SimTime micros(std::int64_t us);

    constexpr std::int64_t ticks() const noexcept { return ticks_; }
    double to_seconds() const noexcept {
        return static_cast<double>(ticks_) / static_cast<double>(kTicksPerSecond);
    }

    friend SimTime operator+(SimTime a, SimTime b);
    friend SimTime operator-(SimTime a, SimTime b);
    SimTime& operator+=(SimTime other) { return *this = *this + other; }
    SimTime& operator-=(SimTime other) { return *this = *this - other; }
    SimTime operator*(std::int64_t factor) const;
    /// Truncating division by a positive count.
    SimTime operator/(std::int64_t divisor) const;

    friend constexpr auto operator<=>(SimTime, SimTime) noexcept = default;
    friend constexpr bool operator==(SimTime, SimTime) noexcept = default;

    /// Decimal seconds with at least one fractional digit: "0.1", "1.0", "0.000000000001".
    std::string str() const;
    /// Shortest exact form with a unit suffix: "100ms", "1s", "1.5us".
    std::string str_with_unit() const;

    /// Inverse of str(): a plain decimal number of seconds.
    static SimTime parse_seconds(std::string_view text);
    /// Number followed by one of s, ms, us, ns, ps. A bare number is rejected.
    static SimTime parse(std::string_view text);
    /// Exact conversion of a decimal number scaled by 10^-unit_exponent seconds.
    static SimTime from_decimal(std::string_view number, int unit_exponent);

    /// Tick exponent of a time unit (s=12 ... ps=0), or -1 if the unit is unknown.
    static int unit_exponent(std::string_view unit) noexcept;

private:
    std::int64_t ticks_ = 0;
};

} // namespace polysim
