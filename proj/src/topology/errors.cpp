#include "polysim/topology/errors.hpp"

namespace polysim::topo {

const char* to_string(TopoErrc code) noexcept {
    switch (code) {
    case TopoErrc::SyntaxError: return "SyntaxError";
    case TopoErrc::DuplicateName: return "DuplicateName";
    case TopoErrc::DuplicateSection: return "DuplicateSection";
    case TopoErrc::UnknownUnit: return "UnknownUnit";
    case TopoErrc::UnknownKey: return "UnknownKey";
    case TopoErrc::UnknownSection: return "UnknownSection";
    case TopoErrc::UnknownNetwork: return "UnknownNetwork";
    case TopoErrc::UnknownModuleType: return "UnknownModuleType";
    case TopoErrc::UnknownParameter: return "UnknownParameter";
    case TopoErrc::UnknownGate: return "UnknownGate";
    case TopoErrc::ParameterType: return "ParameterType";
    case TopoErrc::UnassignedParameter: return "UnassignedParameter";
    case TopoErrc::GateDirectionMismatch: return "GateDirectionMismatch";
    case TopoErrc::GateAlreadyConnected: return "GateAlreadyConnected";
    case TopoErrc::UnconnectedGate: return "UnconnectedGate";
    case TopoErrc::InterfaceMismatch: return "InterfaceMismatch";
    case TopoErrc::RecursiveType: return "RecursiveType";
    }
    return "?";
}

namespace {

std::string render(TopoErrc code, const std::string& message, const std::string& origin, SourcePos pos,
                   const std::vector<std::string>& expected) {
    std::string out;
    if (!origin.empty()) out += origin + ":";
    if (pos.line > 0) out += pos.str() + ":";
    if (!out.empty()) out += " ";
    out += std::string(to_string(code)) + ": " + message;
    if (!expected.empty()) {
        out += " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
            out += expected[i];
        }
        out += ")";
    }
    return out;
}

} // namespace

TopologyError::TopologyError(TopoErrc code, std::string message, std::string origin, SourcePos pos,
                             std::vector<std::string> expected)
    : std::runtime_error(render(code, message, origin, pos, expected)),
      code_(code),
      message_(std::move(message)),
      origin_(std::move(origin)),
      pos_(pos),
      expected_(std::move(expected)) {}

} // namespace polysim::topo
