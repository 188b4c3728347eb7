#include "polysim/runner/session.hpp"

#include "polysim/bridge/inprocess.hpp"
#include "polysim/stdmodels/models.hpp"

#ifdef POLYSIM_HAVE_PYTHON
#include "polysim/bridge/python_runtime.hpp"
#endif

namespace polysim::runner {

std::string default_runtime_kind() {
#ifdef POLYSIM_HAVE_PYTHON
    return "python";
#else
    return "inprocess";
#endif
}

std::unique_ptr<bridge::GuestRuntime> default_runtime_factory(const std::string& kind) {
    const std::string k = kind.empty() ? default_runtime_kind() : kind;
    if (k == "inprocess") return std::make_unique<bridge::InProcessRuntime>();
#ifdef POLYSIM_HAVE_PYTHON
    if (k == "python") return std::make_unique<bridge::PythonRuntime>();
#endif
    throw bridge::BridgeError(bridge::BridgeErrc::RuntimeStartFailure,
                              "guest runtime '" + k + "' is not available in this build");
}

topo::ModuleTypeRegistry standard_registry() {
    topo::ModuleTypeRegistry r;
    stdmodels::register_stdmodels(r);
    return r;
}

Session::Session(const topo::TopologyAst& ast, const topo::RunSettings& settings,
                 const topo::ModuleTypeRegistry& registry, SessionOptions options)
    : settings_(settings) {
    topo::ElaboratedNetwork net = topo::elaborate(ast, settings_, registry);
    connections_ = net.connection_count;
    sim_ = std::make_unique<Simulation>(std::move(net.network),
                                        SimulationOptions{settings_.seed.value_or(1), options.event_sink, options.info});
    if (!net.guest_requests.empty()) {
        bridge::RuntimeConfig cfg{settings_.guest.runtime_path, settings_.guest.module_path,
                                  settings_.guest.verify_registrations};
        bridge_ = std::make_unique<bridge::GuestBridge>(*sim_, options.runtime_factory(settings_.guest.runtime),
                                                        std::move(cfg));
        for (const auto& req : net.guest_requests) {
            bridge_->create_guest_module(sim_->network().module(req.module), req.class_name);
        }
    }
    sim_->validate();
}

Session::~Session() {
    // the bridge holds references into the simulation
    bridge_.reset();
}

bridge::RuntimeStatus Session::guest_status() const noexcept {
    return bridge_ ? bridge_->status() : bridge::RuntimeStatus::NotStarted;
}

RunReport Session::run() {
    RunLimits limits;
    limits.time_limit = settings_.time_limit;
    limits.event_limit = settings_.event_limit;
    RunReport report = sim_->run(limits);
    if (bridge_) bridge_->teardown();
    return report;
}

} // namespace polysim::runner
