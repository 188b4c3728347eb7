#include "polysim/kernel/errors.hpp"

namespace polysim {

const char* to_string(SimErrc code) noexcept {
    switch (code) {
    case SimErrc::TimeOverflow: return "TimeOverflow";
    case SimErrc::TimeSyntax: return "TimeSyntax";
    case SimErrc::TimeMissingUnit: return "TimeMissingUnit";
    case SimErrc::TimeUnknownUnit: return "TimeUnknownUnit";
    case SimErrc::TimeTooPrecise: return "TimeTooPrecise";
    case SimErrc::SchedulingInPast: return "SchedulingInPast";
    case SimErrc::NotOwner: return "NotOwner";
    case SimErrc::UnconnectedGate: return "UnconnectedGate";
    case SimErrc::WrongDirection: return "WrongDirection";
    case SimErrc::NotScheduled: return "NotScheduled";
    case SimErrc::UnknownGate: return "UnknownGate";
    case SimErrc::UnknownParameter: return "UnknownParameter";
    case SimErrc::ParameterType: return "ParameterType";
    case SimErrc::InvalidState: return "InvalidState";
    case SimErrc::ValidationFailure: return "ValidationFailure";
    case SimErrc::CallbackFailure: return "CallbackFailure";
    }
    return "Unknown";
}

} // namespace polysim
