#pragma once

#include "polysim/bridge/bridge.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace polysim::bridge {

/// Guest runtime backed by an embedded CPython interpreter.
///
/// Guest classes are `module.Class` names resolved on the guest module path;
/// they derive from polysim._stubs.SimpleModuleBase, whose constructor binds
/// the new object through the `_polysim_host` builtin module. The interpreter
/// is started on first use and stays alive for the rest of the process;
/// shutdown() releases the guest objects and forgets every module imported
/// during the run, so the next run imports guest code afresh.
class PythonRuntime : public GuestRuntime {
public:
    PythonRuntime();
    ~PythonRuntime() override;

    std::string name() const override { return "python"; }
    void start(const RuntimeConfig& config, GuestBridge& bridge) override;
    abi::RegistrationTable registration_table() override;
    void construct(const std::string& class_name) override;
    void invoke(std::uint64_t token, Callback which, std::optional<abi::Handle> msg) override;
    void release(std::uint64_t token) noexcept override;
    void shutdown() noexcept override;

    std::size_t live_objects() const noexcept;

    struct State;

private:
    std::unique_ptr<State> state_;
};

} // namespace polysim::bridge
