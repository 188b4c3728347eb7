#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace polysim {

enum class SimErrc {
    TimeOverflow,
    TimeSyntax,
    TimeMissingUnit,
    TimeUnknownUnit,
    TimeTooPrecise,
    SchedulingInPast,
    NotOwner,
    UnconnectedGate,
    WrongDirection,
    NotScheduled,
    UnknownGate,
    UnknownParameter,
    ParameterType,
    InvalidState,
    ValidationFailure,
    CallbackFailure,
};

const char* to_string(SimErrc code) noexcept;

/// Error raised by kernel operations. The code identifies the contract that
/// was violated; the message carries the human-readable detail.
class SimError : public std::runtime_error {
public:
    SimError(SimErrc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    SimErrc code() const noexcept { return code_; }

private:
    SimErrc code_;
};

/// A module callback (initialize, handle_message, finish) raised.
class CallbackFailure : public SimError {
public:
    CallbackFailure(std::string module_path, std::string callback, std::string cause)
        : SimError(SimErrc::CallbackFailure,
                   "callback " + callback + "() of module " + module_path + " failed: " + cause),
          module_path_(std::move(module_path)),
          callback_(std::move(callback)),
          cause_(std::move(cause)) {}

    const std::string& module_path() const noexcept { return module_path_; }
    const std::string& callback() const noexcept { return callback_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::string module_path_;
    std::string callback_;
    std::string cause_;
};

} // namespace polysim
