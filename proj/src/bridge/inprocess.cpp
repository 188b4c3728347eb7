#include "polysim/bridge/inprocess.hpp"

#include <filesystem>

namespace polysim::bridge {

InProcessGuest::InProcessGuest(InProcessRuntime& runtime) : runtime_(runtime) { bind(); }

void InProcessGuest::bind() {
    if (host_.value != 0) throw BridgeError(BridgeErrc::InvalidState, "guest object already bound");
    host_ = runtime_.bind(*this);
}

abi::Value InProcessGuest::call(std::string_view export_name, std::vector<abi::Value> args) {
    return runtime_.bridge().call_export(export_name, args);
}

InProcessRuntime::InProcessRuntime() { register_reference_guests(*this); }

void InProcessRuntime::register_class(std::string class_name, InProcessFactory factory) {
    classes_[std::move(class_name)] = std::move(factory);
}

namespace {

std::string joined(const std::vector<std::string>& dirs) {
    if (dirs.empty()) return "(empty)";
    std::string out;
    for (const auto& d : dirs) out += (out.empty() ? "" : ":") + d;
    return out;
}

} // namespace

void InProcessRuntime::start(const RuntimeConfig& config, GuestBridge& bridge) {
    if (!config.runtime_path.empty() && !std::filesystem::exists(config.runtime_path)) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure, "guest runtime path " + config.runtime_path + " does not exist");
    }
    const auto table = find_registration_table(config.module_path);
    if (!table) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure,
                          "guest SDK not found: no polysim/registration.tsv on guest module path " +
                              joined(config.module_path));
    }
    table_path_ = *table;
    module_path_ = config.module_path;
    bridge_ = &bridge;
}

abi::RegistrationTable InProcessRuntime::registration_table() {
    try {
        return abi::load_table_file(table_path_);
    } catch (const abi::TableFormatError& e) {
        throw BridgeError(BridgeErrc::RegistrationMismatch, table_path_ + ": " + e.what());
    } catch (const std::exception& e) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure, e.what());
    }
}

GuestBridge& InProcessRuntime::bridge() const {
    if (bridge_ == nullptr) throw BridgeError(BridgeErrc::InvalidState, "in-process runtime is not running");
    return *bridge_;
}

abi::Handle InProcessRuntime::bind(InProcessGuest& guest) {
    const std::uint64_t token = next_token_++;
    const PeerPair pair = bridge().bind_peer(token);
    constructing_[token] = &guest;
    return pair.host;
}

void InProcessRuntime::construct(const std::string& class_name) {
    const auto it = classes_.find(class_name);
    if (it == classes_.end()) {
        throw BridgeError(BridgeErrc::UnknownGuestClass, "no guest class '" + class_name +
                                                             "' in the in-process runtime (guest module path " +
                                                             joined(module_path_) + ")");
    }
    constructing_.clear();
    std::unique_ptr<InProcessGuest> obj;
    try {
        obj = it->second(*this);
    } catch (const std::exception& e) {
        constructing_.clear();
        throw BridgeError(BridgeErrc::GuestConstructorFailure, class_name + "(): " + e.what());
    }
    for (const auto& [token, ptr] : constructing_) {
        if (ptr == obj.get()) {
            class_of_[token] = class_name;
            objects_[token] = std::move(obj);
            break;
        }
    }
    constructing_.clear();
}

void InProcessRuntime::invoke(std::uint64_t token, Callback which, std::optional<abi::Handle> msg) {
    const auto it = objects_.find(token);
    if (it == objects_.end()) {
        throw BridgeError(BridgeErrc::StaleHandle, "guest object " + std::to_string(token) + " was released");
    }
    InProcessGuest& g = *it->second;
    try {
        switch (which) {
        case Callback::Initialize: g.initialize(); break;
        case Callback::HandleMessage: g.handle_message(msg.value_or(abi::Handle{})); break;
        case Callback::Finish: g.finish(); break;
        }
    } catch (const std::exception& e) {
        throw BridgeError(BridgeErrc::GuestCallbackFailure,
                          class_of_[token] + "." + to_string(which) + "(): " + e.what());
    }
}

void InProcessRuntime::release(std::uint64_t token) noexcept {
    objects_.erase(token);
    class_of_.erase(token);
}

void InProcessRuntime::shutdown() noexcept {
    objects_.clear();
    class_of_.clear();
    bridge_ = nullptr;
}

} // namespace polysim::bridge
