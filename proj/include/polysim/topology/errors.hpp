#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace polysim::topo {

enum class TopoErrc {
    SyntaxError,
    DuplicateName,
    DuplicateSection,
    UnknownUnit,
    UnknownKey,
    UnknownSection,
    UnknownNetwork,
    UnknownModuleType,
    UnknownParameter,
    UnknownGate,
    ParameterType,
    UnassignedParameter,
    GateDirectionMismatch,
    GateAlreadyConnected,
    UnconnectedGate,
    InterfaceMismatch,
    RecursiveType,
};

const char* to_string(TopoErrc code) noexcept;

struct SourcePos {
    int line = 0;
    int column = 0;

    /// Positions are diagnostics only; they never make two nodes differ.
    friend bool operator==(const SourcePos&, const SourcePos&) noexcept { return true; }
    std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Diagnostic from parsing, config handling or elaboration.
class TopologyError : public std::runtime_error {
public:
    TopologyError(TopoErrc code, std::string message, std::string origin = {}, SourcePos pos = {},
                  std::vector<std::string> expected = {});

    TopoErrc code() const noexcept { return code_; }
    /// File or buffer name, may be empty.
    const std::string& origin() const noexcept { return origin_; }
    const SourcePos& pos() const noexcept { return pos_; }
    bool has_pos() const noexcept { return pos_.line > 0; }
    /// For syntax errors: tokens that would have been accepted.
    const std::vector<std::string>& expected() const noexcept { return expected_; }
    const std::string& message() const noexcept { return message_; }

private:
    TopoErrc code_;
    std::string message_;
    std::string origin_;
    SourcePos pos_;
    std::vector<std::string> expected_;
};

} // namespace polysim::topo
