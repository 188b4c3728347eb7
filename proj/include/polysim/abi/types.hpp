#pragma once

#include "polysim/kernel/simtime.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace polysim::abi {

/// Semantic types that may cross the host/guest boundary.
enum class SigType { Int64, Float64, String, Bool, Handle, SimTime, Void };

const char* to_string(SigType t) noexcept;
std::optional<SigType> sig_type_from(std::string_view text) noexcept;

/// Parameter list plus return type. An empty parameter list is written as
/// the empty string in table files.
struct Signature {
    std::vector<SigType> params;
    SigType returns = SigType::Void;

    friend bool operator==(const Signature&, const Signature&) = default;

    /// "int64,handle" (possibly empty).
    std::string params_str() const;
    /// "(int64,handle) -> bool", for diagnostics.
    std::string str() const;
};

/// Comma-separated type list; "" and "void" both mean no parameters.
std::vector<SigType> parse_param_list(std::string_view text);

/// Opaque reference to a host or guest object.
struct Handle {
    std::uint64_t value = 0;
    friend bool operator==(const Handle&, const Handle&) = default;
};

/// A value crossing the boundary. monostate stands for void.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool, Handle, SimTime>;

SigType type_of(const Value& v) noexcept;
std::string describe(const Value& v);

} // namespace polysim::abi
