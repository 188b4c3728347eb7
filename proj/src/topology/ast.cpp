#include "polysim/topology/ast.hpp"

#include <algorithm>

namespace polysim::topo {

const char* keyword(DeclKind kind) noexcept {
    switch (kind) {
    case DeclKind::Simple: return "simple";
    case DeclKind::Compound: return "module";
    case DeclKind::Network: return "network";
    }
    return "?";
}

std::string Endpoint::str() const {
    std::string s;
    if (!submodule.empty()) {
        s = submodule;
        if (submodule_index) s += "[" + std::to_string(*submodule_index) + "]";
        s += ".";
    }
    s += gate;
    if (gate_index) s += "[" + std::to_string(*gate_index) + "]";
    return s;
}

namespace {
template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view n) noexcept {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == n; });
    return it == items.end() ? nullptr : &*it;
}
} // namespace

const ParamDecl* ModuleDecl::find_param(std::string_view n) const noexcept { return find_named(parameters, n); }
const GateDecl* ModuleDecl::find_gate(std::string_view n) const noexcept { return find_named(gates, n); }
const SubmoduleDecl* ModuleDecl::find_submodule(std::string_view n) const noexcept { return find_named(submodules, n); }

const ModuleDecl* TopologyAst::find(std::string_view n) const noexcept { return find_named(decls, n); }

std::size_t TopologyAst::count(DeclKind kind) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(decls.begin(), decls.end(), [&](const ModuleDecl& d) { return d.kind == kind; }));
}

void TopologyAst::merge(TopologyAst other) {
    for (auto& d : other.decls) {
        if (find(d.name) != nullptr) {
            throw TopologyError(TopoErrc::DuplicateName, "module type '" + d.name + "' is declared twice", {}, d.pos);
        }
        decls.push_back(std::move(d));
    }
}

} // namespace polysim::topo
