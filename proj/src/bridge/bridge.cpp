#include "polysim/bridge/bridge.hpp"

#include "polysim/kernel/errors.hpp"

#include <filesystem>

namespace polysim::bridge {

const char* to_string(BridgeErrc code) noexcept {
    switch (code) {
    case BridgeErrc::RuntimeStartFailure: return "RuntimeStartFailure";
    case BridgeErrc::RegistrationMismatch: return "RegistrationMismatch";
    case BridgeErrc::UnknownGuestClass: return "UnknownGuestClass";
    case BridgeErrc::GuestConstructorFailure: return "GuestConstructorFailure";
    case BridgeErrc::GuestCallbackFailure: return "GuestCallbackFailure";
    case BridgeErrc::StaleHandle: return "StaleHandle";
    case BridgeErrc::UnknownExport: return "UnknownExport";
    case BridgeErrc::ArgumentType: return "ArgumentType";
    case BridgeErrc::InvalidState: return "InvalidState";
    }
    return "?";
}

const char* to_string(Callback which) noexcept {
    switch (which) {
    case Callback::Initialize: return "initialize";
    case Callback::HandleMessage: return "handle_message";
    case Callback::Finish: return "finish";
    }
    return "?";
}

const char* to_string(RuntimeStatus status) noexcept {
    switch (status) {
    case RuntimeStatus::NotStarted: return "not-started";
    case RuntimeStatus::Starting: return "starting";
    case RuntimeStatus::Ready: return "ready";
    case RuntimeStatus::Failed: return "failed";
    case RuntimeStatus::TornDown: return "torn-down";
    }
    return "?";
}

std::optional<std::string> find_registration_table(const std::vector<std::string>& module_path) {
    namespace fs = std::filesystem;
    for (const auto& dir : module_path) {
        std::error_code ec;
        const fs::path candidate = fs::path(dir) / "polysim" / "registration.tsv";
        if (fs::is_regular_file(candidate, ec)) return candidate.string();
    }
    return std::nullopt;
}

GuestBridge::GuestBridge(Simulation& sim, std::unique_ptr<GuestRuntime> runtime, RuntimeConfig config,
                         const ExportRegistry& exports)
    : sim_(sim), runtime_(std::move(runtime)), config_(std::move(config)), exports_(exports) {
    destroy_listener_ = sim_.messages().add_destroy_listener([this](MessageId id) {
        auto it = message_handles_.find(id);
        if (it == message_handles_.end()) return;
        handles_.release(it->second);
        message_handles_.erase(it);
    });
}

GuestBridge::~GuestBridge() {
    teardown();
    sim_.messages().remove_destroy_listener(destroy_listener_);
}

void GuestBridge::init_guest_runtime() {
    switch (status_) {
    case RuntimeStatus::Ready: return;
    case RuntimeStatus::Failed: throw *start_error_;
    case RuntimeStatus::TornDown: throw BridgeError(BridgeErrc::InvalidState, "guest runtime was torn down");
    case RuntimeStatus::Starting: throw BridgeError(BridgeErrc::InvalidState, "guest runtime start re-entered");
    case RuntimeStatus::NotStarted: break;
    }
    status_ = RuntimeStatus::Starting;
    try {
        try {
            runtime_->start(config_, *this);
            const abi::RegistrationTable table = runtime_->registration_table();
            if (config_.verify_registrations) {
                report_ = verify_registrations(table, exports_);
                if (!report_.ok()) {
                    throw BridgeError(BridgeErrc::RegistrationMismatch,
                                      "guest SDK registration table disagrees with the kernel exports:\n" +
                                          report_.str());
                }
            }
        } catch (const BridgeError&) {
            throw;
        } catch (const std::exception& e) {
            throw BridgeError(BridgeErrc::RuntimeStartFailure, runtime_->name() + " runtime: " + e.what());
        }
    } catch (const BridgeError& e) {
        status_ = RuntimeStatus::Failed;
        start_error_ = e;
        runtime_->shutdown();
        throw;
    }
    status_ = RuntimeStatus::Ready;
}

void GuestBridge::require_ready(const char* what) const {
    if (status_ != RuntimeStatus::Ready) {
        throw BridgeError(BridgeErrc::InvalidState,
                          std::string(what) + " needs a ready guest runtime (status " + to_string(status_) + ")");
    }
}

PeerPair GuestBridge::create_guest_module(Module& module, const std::string& class_name) {
    init_guest_runtime();
    require_ready("create_guest_module");
    if (!module.is_simple()) {
        throw BridgeError(BridgeErrc::InvalidState, module.path() + " is not a simple module");
    }
    const abi::Handle host = handles_.allocate(HandleKind::HostModule, static_cast<std::uint64_t>(module.id()));
    pending_host_ = host;
    bound_.reset();
    auto discard = [&] {
        if (bound_) {
            const auto it = by_host_.find(host.value);
            if (it != by_host_.end()) {
                runtime_->release(it->second.token);
                by_host_.erase(it);
            }
            by_guest_.erase(bound_->guest.value);
            handles_.release(bound_->guest);
        }
        handles_.release(host);
        pending_host_.reset();
        bound_.reset();
    };
    try {
        runtime_->construct(class_name);
    } catch (...) {
        discard();
        throw;
    }
    if (!bound_) {
        discard();
        throw BridgeError(BridgeErrc::GuestConstructorFailure,
                          "constructor of " + class_name + " for " + module.path() +
                              " returned without running the guest base-class constructor");
    }
    const PeerPair pair = *bound_;
    pending_host_.reset();
    bound_.reset();
    peers_.push_back(pair);
    sim_.install_behavior(module, std::make_unique<GuestModuleShell>(*this, pair, class_name));
    return pair;
}

PeerPair GuestBridge::bind_peer(std::uint64_t token) {
    if (!pending_host_) throw BridgeError(BridgeErrc::InvalidState, "bind_peer called outside guest construction");
    if (bound_) throw BridgeError(BridgeErrc::InvalidState, "guest object bound twice during one construction");
    const abi::Handle guest = handles_.allocate(HandleKind::GuestObject, token);
    const auto module = static_cast<ModuleId>(handles_.resolve(*pending_host_, HandleKind::HostModule));
    bound_ = PeerPair{*pending_host_, guest};
    by_host_[pending_host_->value] = PeerInfo{module, token, guest};
    by_guest_[guest.value] = *pending_host_;
    return *bound_;
}

void GuestBridge::dispatch(const PeerPair& peer, Callback which, MessagePtr msg) {
    require_ready(to_string(which));
    const auto it = by_host_.find(peer.host.value);
    if (it == by_host_.end() || !handles_.live(peer.guest)) {
        throw BridgeError(BridgeErrc::StaleHandle, "no live guest object behind host handle " +
                                                       std::to_string(peer.host.value));
    }
    const PeerInfo info = it->second;
    std::optional<abi::Handle> h;
    if (msg) h = give_message(std::move(msg), sim_.network().module(info.module));
    runtime_->invoke(info.token, which, h);
}

abi::Value GuestBridge::call_export(std::string_view name, std::span<const abi::Value> args) {
    const ExportEntry* e = exports_.find(name);
    if (e == nullptr) throw BridgeError(BridgeErrc::UnknownExport, "no kernel export named '" + std::string(name) + "'");
    const auto& params = e->signature.params;
    if (args.size() != params.size()) {
        throw BridgeError(BridgeErrc::ArgumentType, e->name + " expects " + std::to_string(params.size()) +
                                                        " argument(s), got " + std::to_string(args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (abi::type_of(args[i]) != params[i]) {
            throw BridgeError(BridgeErrc::ArgumentType, "argument " + std::to_string(i + 1) + " of " + e->name +
                                                            ": expected " + abi::to_string(params[i]) + ", got " +
                                                            abi::to_string(abi::type_of(args[i])));
        }
    }
    abi::Value result = e->fn(*this, args);
    if (abi::type_of(result) != e->signature.returns) {
        throw std::logic_error("export " + e->name + " returned " + abi::to_string(abi::type_of(result)));
    }
    return result;
}

void GuestBridge::teardown() noexcept {
    if (status_ == RuntimeStatus::TornDown) return;
    const bool started = status_ != RuntimeStatus::NotStarted;
    for (const auto& [host, info] : by_host_) runtime_->release(info.token);
    by_host_.clear();
    by_guest_.clear();
    if (started) runtime_->shutdown();
    status_ = RuntimeStatus::TornDown;

    std::vector<MessagePtr> doomed;
    doomed.reserve(held_.size());
    for (auto& [id, held] : held_) doomed.push_back(std::move(held.msg));
    held_.clear();
    doomed.clear();

    handles_.release_all();
    message_handles_.clear();
}

Module& GuestBridge::module_of(abi::Handle host) const {
    const auto id = static_cast<ModuleId>(handles_.resolve(host, HandleKind::HostModule));
    return sim_.network().module(id);
}

abi::Handle GuestBridge::guest_for(abi::Handle host) const {
    handles_.resolve(host, HandleKind::HostModule);
    const auto it = by_host_.find(host.value);
    if (it == by_host_.end()) {
        throw BridgeError(BridgeErrc::StaleHandle, "host handle " + std::to_string(host.value) + " has no guest peer");
    }
    return it->second.guest;
}

abi::Handle GuestBridge::host_for(abi::Handle guest) const {
    handles_.resolve(guest, HandleKind::GuestObject);
    return by_guest_.at(guest.value);
}

Message& GuestBridge::held_message(abi::Handle msg) const {
    const MessageId id = handles_.resolve(msg, HandleKind::Message);
    const auto it = held_.find(id);
    if (it == held_.end()) {
        const Message* m = sim_.messages().find(id);
        throw BridgeError(BridgeErrc::InvalidState,
                          "message handle " + std::to_string(msg.value) + " is not held by a guest (owner " +
                              (m ? m->owner().str() : std::string("none")) + ")");
    }
    return *it->second.msg;
}

MessagePtr GuestBridge::take_message(abi::Handle msg, Module& module) {
    held_message(msg);
    const auto it = held_.find(handles_.resolve(msg, HandleKind::Message));
    if (it->second.holder != module.id()) {
        throw BridgeError(BridgeErrc::InvalidState, "message handle " + std::to_string(msg.value) +
                                                        " is held by " + sim_.network().module(it->second.holder).path() +
                                                        ", not " + module.path());
    }
    MessagePtr out = std::move(it->second.msg);
    held_.erase(it);
    sim_.messages().transfer(*out, Owner::guest(), Owner::module(module.id()));
    return out;
}

void GuestBridge::destroy_message(abi::Handle msg) {
    held_message(msg);
    const auto it = held_.find(handles_.resolve(msg, HandleKind::Message));
    MessagePtr doomed = std::move(it->second.msg);
    held_.erase(it);
}

abi::Handle GuestBridge::give_message(MessagePtr msg, Module& module) {
    sim_.messages().transfer(*msg, Owner::module(module.id()), Owner::guest());
    const MessageId id = msg->id();
    const abi::Handle h = message_handle(id);
    held_[id] = Held{std::move(msg), module.id()};
    return h;
}

abi::Handle GuestBridge::message_handle(MessageId id) {
    const auto it = message_handles_.find(id);
    if (it != message_handles_.end()) return it->second;
    const abi::Handle h = handles_.allocate(HandleKind::Message, id);
    message_handles_.emplace(id, h);
    return h;
}

std::vector<std::string> GuestBridge::audit() const {
    std::vector<std::string> problems;
    std::size_t tagged_guest = 0;
    for (const Message* m : sim_.messages().live_messages()) {
        if (m->owner() == Owner::guest()) {
            ++tagged_guest;
            if (!held_.count(m->id())) problems.push_back("message " + std::to_string(m->id()) + " tagged guest but not held");
        }
    }
    if (tagged_guest != held_.size()) {
        problems.push_back(std::to_string(held_.size()) + " messages held but " + std::to_string(tagged_guest) +
                           " tagged guest");
    }
    for (const auto& [id, held] : held_) {
        const auto h = message_handles_.find(id);
        if (h == message_handles_.end() || !handles_.live(h->second)) {
            problems.push_back("held message " + std::to_string(id) + " has no live handle");
        }
    }
    return problems;
}

} // namespace polysim::bridge
