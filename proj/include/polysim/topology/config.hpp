#pragma once

#include "polysim/kernel/simtime.hpp"
#include "polysim/topology/errors.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polysim::topo {

/// `pattern = value` where pattern addresses `<module path>.<parameter>`.
struct ParamAssignment {
    std::string pattern;
    std::string value; // raw text, typed during elaboration
    std::string section;
    SourcePos pos;
};

struct GuestSettings {
    /// "python" or "inprocess"; empty means the runner's default.
    std::string runtime;
    /// Interpreter/VM location override (python: library or home dir).
    std::string runtime_path;
    /// Directories searched for guest classes and the guest SDK.
    std::vector<std::string> module_path;
    /// false when `guest-sdk-check = off`: the registration table is not verified.
    bool verify_registrations = true;
};

struct ConfigSection {
    std::string name;
    std::optional<std::string> parent;
    SourcePos pos;

    std::optional<std::string> network;
    std::optional<SimTime> time_limit;
    std::optional<std::uint64_t> event_limit;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> guest_runtime;
    std::optional<std::string> guest_runtime_path;
    std::optional<std::vector<std::string>> guest_module_path;
    std::optional<bool> guest_sdk_check;

    std::vector<ParamAssignment> params;
};

struct Config {
    std::string origin;
    std::vector<ConfigSection> sections;

    const ConfigSection* find(std::string_view name) const noexcept;
};

/// Parses ini-style run configuration. Throws TopologyError
/// (SyntaxError, DuplicateSection, UnknownUnit, UnknownKey).
Config parse_config(std::string_view text, std::string origin = {});
Config parse_config_file(const std::string& path);

/// A section with inheritance applied.
struct RunSettings {
    std::string section;
    std::optional<std::string> network;
    std::optional<SimTime> time_limit;
    std::optional<std::uint64_t> event_limit;
    std::optional<std::uint64_t> seed;
    GuestSettings guest;
    /// Most-derived section first, file order within a section.
    std::vector<ParamAssignment> params;

    /// First assignment whose pattern matches `parameter_path`, or null.
    const ParamAssignment* lookup(std::string_view parameter_path) const noexcept;
};

/// Flattens `section` and its ancestors (ending at General). UnknownSection if
/// the section or a parent is missing; General may be absent.
RunSettings resolve(const Config& config, std::string_view section = "General");

/// `*` matches within one path segment (no '.'), `**` matches anything.
bool pattern_match(std::string_view pattern, std::string_view path) noexcept;

} // namespace polysim::topo
