#pragma once

#include <stdexcept>
#include <string>

namespace polysim::bridge {

enum class BridgeErrc {
    RuntimeStartFailure,
    RegistrationMismatch,
    UnknownGuestClass,
    GuestConstructorFailure,
    GuestCallbackFailure,
    StaleHandle,
    UnknownExport,
    ArgumentType,
    InvalidState,
};

const char* to_string(BridgeErrc code) noexcept;

class BridgeError : public std::runtime_error {
public:
    BridgeError(BridgeErrc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

    BridgeErrc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    BridgeErrc code_;
    std::string detail_;
};

} // namespace polysim::bridge
