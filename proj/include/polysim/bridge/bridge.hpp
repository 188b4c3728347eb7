#pragma once

#include "polysim/abi/registration.hpp"
#include "polysim/bridge/errors.hpp"
#include "polysim/bridge/exports.hpp"
#include "polysim/bridge/handles.hpp"
#include "polysim/kernel/simulation.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace polysim::bridge {

enum class Callback { Initialize, HandleMessage, Finish };

/// "initialize", "handle_message" or "finish": the names guest bases dispatch on.
const char* to_string(Callback which) noexcept;

enum class RuntimeStatus { NotStarted, Starting, Ready, Failed, TornDown };

const char* to_string(RuntimeStatus status) noexcept;

struct RuntimeConfig {
    std::string runtime_path;
    std::vector<std::string> module_path;
    bool verify_registrations = true;
};

/// Host handle of a shell paired with the guest object behind it.
struct PeerPair {
    abi::Handle host;
    abi::Handle guest;
};

/// One guest language runtime. Implementations report failures as BridgeError.
///
/// Guest objects are identified by runtime-chosen tokens. A guest object's
/// constructor must call GuestBridge::bind_peer with its token before the
/// construct() call returns.
class GuestRuntime {
public:
    virtual ~GuestRuntime() = default;

    virtual std::string name() const = 0;
    virtual void start(const RuntimeConfig& config, GuestBridge& bridge) = 0;
    /// The table shipped with the guest SDK that start() located.
    virtual abi::RegistrationTable registration_table() = 0;
    /// Instantiates `class_name`; UnknownGuestClass or GuestConstructorFailure.
    virtual void construct(const std::string& class_name) = 0;
    /// Runs one callback on a guest object; GuestCallbackFailure on a guest exception.
    virtual void invoke(std::uint64_t token, Callback which, std::optional<abi::Handle> msg) = 0;
    virtual void release(std::uint64_t token) noexcept = 0;
    virtual void shutdown() noexcept = 0;
};

/// Connects guest-implemented simple modules to the kernel.
///
/// Owns the guest runtime, the handle registry and every message a guest
/// currently holds. Messages held by a guest carry the Guest owner tag; a
/// message keeps one handle for as long as it exists.
class GuestBridge {
public:
    GuestBridge(Simulation& sim, std::unique_ptr<GuestRuntime> runtime, RuntimeConfig config,
                const ExportRegistry& exports = kernel_exports());
    GuestBridge(const GuestBridge&) = delete;
    GuestBridge& operator=(const GuestBridge&) = delete;
    ~GuestBridge();

    RuntimeStatus status() const noexcept { return status_; }
    GuestRuntime& runtime() noexcept { return *runtime_; }
    Simulation& simulation() noexcept { return sim_; }
    const ExportRegistry& exports() const noexcept { return exports_; }
    const HandleRegistry& handles() const noexcept { return handles_; }
    const RuntimeConfig& config() const noexcept { return config_; }

    /// Starts the runtime and verifies its registration table, once. Repeated
    /// calls after a failure rethrow the original error.
    void init_guest_runtime();
    /// Empty until init_guest_runtime() verified a table.
    const VerificationReport& verification() const noexcept { return report_; }

    /// Constructs the guest object for a simple module and installs the shell
    /// behavior that forwards kernel callbacks to it.
    PeerPair create_guest_module(Module& module, const std::string& class_name);

    /// Called by the runtime from inside a guest base constructor.
    PeerPair bind_peer(std::uint64_t token);

    /// Delivers a callback; `msg` (if any) moves to guest ownership first.
    void dispatch(const PeerPair& peer, Callback which, MessagePtr msg);

    /// Checks arguments against the export's signature, then calls it.
    abi::Value call_export(std::string_view name, std::span<const abi::Value> args);

    /// Releases every guest object, shuts the runtime down and invalidates all
    /// handles. Messages still held by guests are destroyed. Idempotent.
    void teardown() noexcept;

    // accessors used by export implementations

    Module& module_of(abi::Handle host) const;
    /// Message for a live message handle; must be held by a guest.
    Message& held_message(abi::Handle msg) const;
    /// Takes a guest-held message back, moving it to `module`'s ownership.
    /// The caller's module must be the holder.
    MessagePtr take_message(abi::Handle msg, Module& module);
    /// Deletes a guest-held message; its handle goes stale.
    void destroy_message(abi::Handle msg);
    /// Moves a message of `module` to guest hands and returns its handle.
    abi::Handle give_message(MessagePtr msg, Module& module);
    /// Handle of a live message, allocating one on first use.
    abi::Handle message_handle(MessageId id);
    /// Peer lookups in both directions; StaleHandle once either side is gone.
    abi::Handle guest_for(abi::Handle host) const;
    abi::Handle host_for(abi::Handle guest) const;
    /// Messages currently in guest hands.
    std::size_t guest_held_count() const noexcept { return held_.size(); }
    const std::vector<PeerPair>& peers() const noexcept { return peers_; }

    /// Cross-checks guest-held messages against their owner tags and handles;
    /// empty when consistent.
    std::vector<std::string> audit() const;

private:
    void require_ready(const char* what) const;

    struct Held {
        MessagePtr msg;
        ModuleId holder;
    };
    struct PeerInfo {
        ModuleId module;
        std::uint64_t token;
        abi::Handle guest;
    };

    Simulation& sim_;
    std::unique_ptr<GuestRuntime> runtime_;
    RuntimeConfig config_;
    const ExportRegistry& exports_;
    HandleRegistry handles_;
    RuntimeStatus status_ = RuntimeStatus::NotStarted;
    std::optional<BridgeError> start_error_;
    VerificationReport report_;

    std::optional<abi::Handle> pending_host_;
    std::optional<PeerPair> bound_;
    std::unordered_map<std::uint64_t, PeerInfo> by_host_;
    std::unordered_map<std::uint64_t, abi::Handle> by_guest_;
    std::vector<PeerPair> peers_;
    std::unordered_map<MessageId, abi::Handle> message_handles_;
    std::unordered_map<MessageId, Held> held_;
    std::uint64_t destroy_listener_ = 0;
};

/// Kernel-side stand-in for a guest-implemented simple module.
class GuestModuleShell : public SimpleModule {
public:
    GuestModuleShell(GuestBridge& bridge, PeerPair peer, std::string class_name)
        : bridge_(bridge), peer_(peer), class_name_(std::move(class_name)) {}

    void initialize() override { bridge_.dispatch(peer_, Callback::Initialize, nullptr); }
    void handle_message(MessagePtr msg) override { bridge_.dispatch(peer_, Callback::HandleMessage, std::move(msg)); }
    void finish() override { bridge_.dispatch(peer_, Callback::Finish, nullptr); }

    const PeerPair& peer() const noexcept { return peer_; }
    const std::string& class_name() const noexcept { return class_name_; }

private:
    GuestBridge& bridge_;
    PeerPair peer_;
    std::string class_name_;
};

/// `<dir>/polysim/registration.tsv` for the first entry of `module_path`
/// that has one, or nullopt.
std::optional<std::string> find_registration_table(const std::vector<std::string>& module_path);

} // namespace polysim::bridge
