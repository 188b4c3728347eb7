#pragma once

#include "polysim/bridge/bridge.hpp"
#include "polysim/kernel/simulation.hpp"
#include "polysim/topology/elaborate.hpp"

#include <functional>
#include <memory>
#include <ostream>
#include <string>

namespace polysim::runner {

/// Builds the guest runtime named by `guest-runtime` ("" picks the default).
using RuntimeFactory = std::function<std::unique_ptr<bridge::GuestRuntime>(const std::string& kind)>;

/// "inprocess", plus "python" when the embedded interpreter was built.
/// Unknown kinds raise RuntimeStartFailure.
std::unique_ptr<bridge::GuestRuntime> default_runtime_factory(const std::string& kind);

/// Runtime used when the configuration does not name one.
std::string default_runtime_kind();

struct SessionOptions {
    EventSink* event_sink = nullptr;
    std::ostream* info = nullptr;
    RuntimeFactory runtime_factory = default_runtime_factory;
};

/// Registry with the standard model library and its guest bindings.
topo::ModuleTypeRegistry standard_registry();

/// One prepared run: elaborated network, kernel and (for networks with guest
/// modules) the guest bridge. Construction elaborates, constructs every guest
/// object in elaboration order and runs validate(), so any failure surfaces
/// before the first event.
class Session {
public:
    Session(const topo::TopologyAst& ast, const topo::RunSettings& settings, const topo::ModuleTypeRegistry& registry,
            SessionOptions options = {});
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;
    ~Session();

    Simulation& sim() noexcept { return *sim_; }
    /// Null for networks without guest modules.
    bridge::GuestBridge* bridge() noexcept { return bridge_.get(); }
    bridge::RuntimeStatus guest_status() const noexcept;
    const topo::RunSettings& settings() const noexcept { return settings_; }
    std::size_t connection_count() const noexcept { return connections_; }

    /// Runs to the configured limits, calls finish() and tears the guest
    /// runtime down.
    RunReport run();

private:
    topo::RunSettings settings_;
    std::unique_ptr<Simulation> sim_;
    std::unique_ptr<bridge::GuestBridge> bridge_;
    std::size_t connections_ = 0;
};

} // namespace polysim::runner
