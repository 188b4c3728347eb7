#include "polysim/bridge/handles.hpp"

#include "polysim/bridge/errors.hpp"

namespace polysim::bridge {

const char* to_string(HandleKind kind) noexcept {
    switch (kind) {
    case HandleKind::HostModule: return "host module";
    case HandleKind::GuestObject: return "guest object";
    case HandleKind::Message: return "message";
    }
    return "?";
}

abi::Handle HandleRegistry::allocate(HandleKind kind, std::uint64_t target) {
    const abi::Handle h{next_++};
    live_.emplace(h.value, Slot{kind, target});
    return h;
}

std::uint64_t HandleRegistry::resolve(abi::Handle h, HandleKind kind) const {
    const auto it = live_.find(h.value);
    if (it == live_.end()) {
        const char* why = (h.value == 0 || h.value >= next_) ? "was never issued" : "was released";
        throw BridgeError(BridgeErrc::StaleHandle,
                          std::string(to_string(kind)) + " handle " + std::to_string(h.value) + " " + why);
    }
    if (it->second.kind != kind) {
        throw BridgeError(BridgeErrc::ArgumentType, "handle " + std::to_string(h.value) + " names a " +
                                                        to_string(it->second.kind) + ", expected a " +
                                                        to_string(kind));
    }
    return it->second.target;
}

} // namespace polysim::bridge
