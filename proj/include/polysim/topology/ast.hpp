#pragma once

#include "polysim/kernel/module.hpp"
#include "polysim/kernel/param.hpp"
#include "polysim/topology/errors.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polysim::topo {

enum class DeclKind { Simple, Compound, Network };

const char* keyword(DeclKind kind) noexcept;

struct ParamDecl {
    ParamType type = ParamType::Int;
    std::string name;
    std::optional<ParamValue> default_value;
    SourcePos pos;
    friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct GateDecl {
    GateDirection direction = GateDirection::Input;
    std::string name;
    std::optional<int> vector_size;
    bool required = false;
    SourcePos pos;
    friend bool operator==(const GateDecl&, const GateDecl&) = default;
};

struct ParamAssign {
    std::string name;
    ParamValue value;
    SourcePos pos;
    friend bool operator==(const ParamAssign&, const ParamAssign&) = default;
};

struct SubmoduleDecl {
    std::string name;
    std::optional<int> vector_size;
    /// Either a type name, or (when type_from_param) the name of a string
    /// parameter of the enclosing module holding the type name.
    std::string type;
    bool type_from_param = false;
    std::optional<std::string> like;
    std::vector<ParamAssign> assignments;
    SourcePos pos;
    friend bool operator==(const SubmoduleDecl&, const SubmoduleDecl&) = default;
};

/// `sub[i].gate[j]`, or a gate of the enclosing module when `submodule` is empty.
struct Endpoint {
    std::string submodule;
    std::optional<int> submodule_index;
    std::string gate;
    std::optional<int> gate_index;
    SourcePos pos;
    friend bool operator==(const Endpoint&, const Endpoint&) = default;
    std::string str() const;
};

struct ChannelSpec {
    std::optional<SimTime> delay;
    std::optional<std::int64_t> datarate;
    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
    bool empty() const noexcept { return !delay && !datarate; }
};

struct Connection {
    Endpoint from;
    Endpoint to;
    /// Absent for a plain `a --> b`; present (maybe empty) for `a --> { } --> b`.
    std::optional<ChannelSpec> channel;
    SourcePos pos;
    friend bool operator==(const Connection&, const Connection&) = default;
};

struct ModuleDecl {
    DeclKind kind = DeclKind::Simple;
    std::string name;
    /// From `@class("...")`; simple modules only. Empty means "same as name".
    std::string implementation;
    std::vector<ParamDecl> parameters;
    std::vector<GateDecl> gates;
    std::vector<SubmoduleDecl> submodules;
    std::vector<Connection> connections;
    SourcePos pos;
    friend bool operator==(const ModuleDecl&, const ModuleDecl&) = default;

    bool is_simple() const noexcept { return kind == DeclKind::Simple; }
    const std::string& implementation_name() const noexcept { return implementation.empty() ? name : implementation; }
    const ParamDecl* find_param(std::string_view n) const noexcept;
    const GateDecl* find_gate(std::string_view n) const noexcept;
    const SubmoduleDecl* find_submodule(std::string_view n) const noexcept;
};

struct TopologyAst {
    std::vector<ModuleDecl> decls;
    friend bool operator==(const TopologyAst&, const TopologyAst&) = default;

    const ModuleDecl* find(std::string_view name) const noexcept;
    std::size_t count(DeclKind kind) const noexcept;
    /// Appends all declarations of `other`; DuplicateName on a clash.
    void merge(TopologyAst other);
};

/// Implementation names of the form "guest:<module>.<Class>" denote guest classes.
inline constexpr std::string_view kGuestPrefix = "guest:";

} // namespace polysim::topo
