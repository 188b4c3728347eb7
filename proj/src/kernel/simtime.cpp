#include "polysim/kernel/simtime.hpp"

#include "polysim/kernel/errors.hpp"

#include <array>
#include <cctype>

namespace polysim {

namespace {

constexpr std::array<std::int64_t, 13> kPow10 = {
    1LL,
    10LL,
    100LL,
    1'000LL,
    10'000LL,
    100'000LL,
    1'000'000LL,
    10'000'000LL,
    100'000'000LL,
    1'000'000'000LL,
    10'000'000'000LL,
    100'000'000'000LL,
    1'000'000'000'000LL,
};

struct UnitEntry {
    std::string_view name;
    int exponent;
};

constexpr std::array<UnitEntry, 5> kUnits = {{
    {"s", 12},
    {"ms", 9},
    {"us", 6},
    {"ns", 3},
    {"ps", 0},
}};

[[noreturn]] void overflow(const char* op) {
    throw SimError(SimErrc::TimeOverflow, std::string("simulation time overflow in ") + op);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* op) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) overflow(op);
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* op) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) overflow(op);
    return r;
}

} // namespace

SimTime SimTime::seconds(std::int64_t s) { return from_ticks(checked_mul(s, kTicksPerSecond, "seconds()")); }
SimTime SimTime::millis(std::int64_t ms) { return from_ticks(checked_mul(ms, kPow10[9], "millis()")); }
SimTime SimTime::micros(std::int64_t us) { return from_ticks(checked_mul(us, kPow10[6], "micros()")); }

SimTime operator+(SimTime a, SimTime b) { return SimTime::from_ticks(checked_add(a.ticks_, b.ticks_, "addition")); }

SimTime operator-(SimTime a, SimTime b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a.ticks_, b.ticks_, &r)) overflow("subtraction");
    return SimTime::from_ticks(r);
}

SimTime SimTime::operator*(std::int64_t factor) const { return from_ticks(checked_mul(ticks_, factor, "multiplication")); }

SimTime SimTime::operator/(std::int64_t divisor) const {
    if (divisor <= 0) throw SimError(SimErrc::InvalidState, "SimTime division by a non-positive count");
    return from_ticks(ticks_ / divisor);
}

std::string SimTime::str() const {
    std::string out;
    std::uint64_t magnitude = ticks_ < 0 ? 0 - static_cast<std::uint64_t>(ticks_) : static_cast<std::uint64_t>(ticks_);
    if (ticks_ < 0) out.push_back('-');
    const auto per_second = static_cast<std::uint64_t>(kTicksPerSecond);
    out += std::to_string(magnitude / per_second);
    std::string frac = std::to_string(magnitude % per_second);
    frac.insert(0, static_cast<std::size_t>(kScaleExponent) - frac.size(), '0');
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    out.push_back('.');
    out += frac;
    return out;
}

std::string SimTime::str_with_unit() const {
    if (ticks_ == 0) return "0s";
    for (const auto& unit : kUnits) {
        if (ticks_ % kPow10[static_cast<std::size_t>(unit.exponent)] == 0) {
            return std::to_string(ticks_ / kPow10[static_cast<std::size_t>(unit.exponent)]) + std::string(unit.name);
        }
    }
    return std::to_string(ticks_) + "ps";
}

int SimTime::unit_exponent(std::string_view unit) noexcept {
    for (const auto& entry : kUnits) {
        if (entry.name == unit) return entry.exponent;
    }
    return -1;
}

SimTime SimTime::from_decimal(std::string_view number, int unit_exponent) {
    const std::string original(number);
    auto syntax = [&]() -> SimError {
        return SimError(SimErrc::TimeSyntax, "malformed time value '" + original + "'");
    };
    bool negative = false;
    if (!number.empty() && (number.front() == '-' || number.front() == '+')) {
        negative = number.front() == '-';
        number.remove_prefix(1);
    }
    const auto dot = number.find('.');
    std::string_view whole = number.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : number.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw syntax();
    if (dot != std::string_view::npos && frac.empty()) throw syntax();
    for (char c : whole) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw syntax();
    }
    for (char c : frac) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw syntax();
    }

    const auto scale = kPow10[static_cast<std::size_t>(unit_exponent)];
    std::int64_t ticks = 0;
    for (char c : whole) {
        ticks = checked_add(checked_mul(ticks, 10, "parse"), c - '0', "parse");
    }
    ticks = checked_mul(ticks, scale, "parse");

    std::int64_t frac_ticks = 0;
    for (std::size_t i = 0; i < frac.size(); ++i) {
        const int digit = frac[i] - '0';
        if (static_cast<int>(i) >= unit_exponent) {
            if (digit != 0) {
                throw SimError(SimErrc::TimeTooPrecise, "time value '" + original + "' is finer than 1ps");
            }
            continue;
        }
        frac_ticks += digit * kPow10[static_cast<std::size_t>(unit_exponent - 1 - static_cast<int>(i))];
    }
    ticks = checked_add(ticks, frac_ticks, "parse");
    return from_ticks(negative ? -ticks : ticks);
}

SimTime SimTime::parse_seconds(std::string_view text) { return from_decimal(text, kScaleExponent); }

SimTime SimTime::parse(std::string_view text) {
    std::size_t split = 0;
    while (split < text.size()) {
        const char c = text[split];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || ((c == '-' || c == '+') && split == 0)) {
            ++split;
        } else {
            break;
        }
    }
    const auto number = text.substr(0, split);
    const auto unit = text.substr(split);
    if (number.empty()) throw SimError(SimErrc::TimeSyntax, "malformed time value '" + std::string(text) + "'");
    if (unit.empty()) {
        throw SimError(SimErrc::TimeMissingUnit,
                       "time value '" + std::string(text) + "' needs a unit (s, ms, us, ns, ps)");
    }
    const int exponent = unit_exponent(unit);
    if (exponent < 0) {
        throw SimError(SimErrc::TimeUnknownUnit,
                       "unknown time unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
    }
    return from_decimal(number, exponent);
}

} // namespace polysim
