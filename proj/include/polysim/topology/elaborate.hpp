#pragma once

#include "polysim/kernel/module.hpp"
#include "polysim/kernel/simple_module.hpp"
#include "polysim/topology/ast.hpp"
#include "polysim/topology/config.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace polysim::topo {

using NativeFactory = std::function<std::unique_ptr<SimpleModule>()>;

/// Module types known outside the user's topology: library declarations,
/// native implementations and guest class bindings.
class ModuleTypeRegistry {
public:
    /// Declarations usable by any topology (e.g. the standard model library).
    void add_library(TopologyAst ast);
    /// Native behavior for an implementation name.
    void add_native(std::string implementation, NativeFactory factory);
    /// Declares that simple type `type_name` is implemented by a guest class.
    void add_guest(std::string type_name, std::string class_name);

    const ModuleDecl* find_decl(std::string_view name) const noexcept { return library_.find(name); }
    const NativeFactory* find_native(std::string_view implementation) const noexcept;
    const std::string* guest_class(std::string_view type_name) const noexcept;
    const TopologyAst& library() const noexcept { return library_; }

private:
    TopologyAst library_;
    std::map<std::string, NativeFactory, std::less<>> natives_;
    std::map<std::string, std::string, std::less<>> guests_;
};

/// A guest-implemented simple module awaiting construction by the bridge.
struct GuestRequest {
    ModuleId module = 0;
    std::string path;
    std::string class_name;
};

struct ElaboratedNetwork {
    Network network;
    std::vector<GuestRequest> guest_requests;
    /// Connection statements instantiated (vector expansion counts each hop).
    std::size_t connection_count = 0;
};

/// Instantiates `network_name` depth-first in declaration order. Parameter
/// precedence: config pattern, then submodule assignment, then declared
/// default. Native behaviors are constructed and attached; guest modules are
/// left without behavior and listed in guest_requests.
ElaboratedNetwork elaborate(const TopologyAst& ast, const RunSettings& settings, const ModuleTypeRegistry& registry);

/// Convenience: resolves `section` of `config` and uses its `network` key.
ElaboratedNetwork elaborate(const TopologyAst& ast, const Config& config, const ModuleTypeRegistry& registry,
                            std::string_view section = "General");

/// Converts config text to a parameter value of the declared type.
ParamValue convert_config_value(std::string_view text, ParamType type);

} // namespace polysim::topo
