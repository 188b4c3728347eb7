#pragma once

#include "polysim/bridge/bridge.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace polysim::bridge {

class InProcessRuntime;

/// Base class of guest modules written in C++ and run by InProcessRuntime.
///
/// Behaves like the Python SDK's SimpleModuleBase: the constructor binds the
/// object to the host module being created, and every kernel access goes
/// through call() by export name, exactly like a generated stub.
class InProcessGuest {
public:
    struct DeferBind {};

    explicit InProcessGuest(InProcessRuntime& runtime);
    /// Leaves the object unbound; bind() must run before the factory returns.
    InProcessGuest(InProcessRuntime& runtime, DeferBind) : runtime_(runtime) {}
    InProcessGuest(const InProcessGuest&) = delete;
    InProcessGuest& operator=(const InProcessGuest&) = delete;
    virtual ~InProcessGuest() = default;

    virtual void initialize() {}
    virtual void handle_message(abi::Handle msg) = 0;
    virtual void finish() {}

    abi::Handle host_handle() const noexcept { return host_; }

protected:
    void bind();
    abi::Value call(std::string_view export_name, std::vector<abi::Value> args = {});

    template <class T>
    T call_as(std::string_view export_name, std::vector<abi::Value> args = {}) {
        return std::get<T>(call(export_name, std::move(args)));
    }

private:
    InProcessRuntime& runtime_;
    abi::Handle host_;
};

using InProcessFactory = std::function<std::unique_ptr<InProcessGuest>(InProcessRuntime&)>;

/// Guest runtime whose "guest language" is C++ compiled into the host. It
/// follows the same startup contract as an interpreter-backed runtime: the
/// guest SDK (its registration table) must be found on the module path.
class InProcessRuntime : public GuestRuntime {
public:
    /// Starts with the reference guest classes registered.
    InProcessRuntime();

    void register_class(std::string class_name, InProcessFactory factory);

    std::string name() const override { return "inprocess"; }
    void start(const RuntimeConfig& config, GuestBridge& bridge) override;
    abi::RegistrationTable registration_table() override;
    void construct(const std::string& class_name) override;
    void invoke(std::uint64_t token, Callback which, std::optional<abi::Handle> msg) override;
    void release(std::uint64_t token) noexcept override;
    void shutdown() noexcept override;

    bool started() const noexcept { return bridge_ != nullptr; }
    std::size_t live_objects() const noexcept { return objects_.size(); }
    /// Table path located by start().
    const std::string& table_path() const noexcept { return table_path_; }

private:
    friend class InProcessGuest;
    abi::Handle bind(InProcessGuest& guest);
    GuestBridge& bridge() const;

    std::map<std::string, InProcessFactory, std::less<>> classes_;
    std::map<std::uint64_t, std::unique_ptr<InProcessGuest>> objects_;
    std::map<std::uint64_t, InProcessGuest*> constructing_;
    std::map<std::uint64_t, std::string> class_of_;
    GuestBridge* bridge_ = nullptr;
    std::string table_path_;
    std::vector<std::string> module_path_;
    std::uint64_t next_token_ = 1;
};

/// Registers ref.TicTocGuest, ref.PingClientGuest and ref.EchoServerGuest.
void register_reference_guests(InProcessRuntime& runtime);

} // namespace polysim::bridge
