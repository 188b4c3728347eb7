#include "polysim/bridge/bridge.hpp"
#include "polysim/kernel/errors.hpp"

#include <cmath>
#include <limits>

namespace polysim::bridge {

namespace {

using abi::Handle;
using abi::SigType;
using abi::Value;
using Args = std::span<const Value>;

std::int64_t i64(Args a, std::size_t k) { return std::get<std::int64_t>(a[k]); }
double f64(Args a, std::size_t k) { return std::get<double>(a[k]); }
const std::string& str(Args a, std::size_t k) { return std::get<std::string>(a[k]); }
Handle hnd(Args a, std::size_t k) { return std::get<Handle>(a[k]); }
SimTime tm(Args a, std::size_t k) { return std::get<SimTime>(a[k]); }

int narrow_int(std::int64_t v, const char* what) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw BridgeError(BridgeErrc::ArgumentType, std::string(what) + " out of range: " + std::to_string(v));
    }
    return static_cast<int>(v);
}

Gate& out_gate(Module& m, const std::string& name, std::int64_t index) {
    Gate& g = m.gate(name, narrow_int(index, "gate index"));
    // checked here so a failing send leaves the message with the guest
    if (g.direction() != GateDirection::Output) {
        throw SimError(SimErrc::WrongDirection, "gate " + m.path() + "." + g.full_name() + " is an input gate");
    }
    Gate* end = g.path_end();
    if (end == &g || end->direction() != GateDirection::Input || !end->owner().is_simple()) {
        throw SimError(SimErrc::UnconnectedGate,
                       "gate " + m.path() + "." + g.full_name() + " is not connected to a simple module");
    }
    return g;
}

const ControlInfo& control(const Message& m) {
    if (!m.control_info()) throw BridgeError(BridgeErrc::InvalidState, "message has no control info");
    return *m.control_info();
}

const ControlInfo& frame_meta(const Message& m) {
    const ControlInfo& c = control(m);
    if (c.kind != ControlInfo::Kind::FrameMeta) {
        throw BridgeError(BridgeErrc::InvalidState, "control info is not frame metadata");
    }
    return c;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* kDigits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += kDigits[b >> 4];
        out += kDigits[b & 0xF];
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& text) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (text.size() % 2 != 0) throw BridgeError(BridgeErrc::ArgumentType, "hex payload has odd length");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 2) {
        const int hi = nibble(text[i]), lo = nibble(text[i + 1]);
        if (hi < 0 || lo < 0) throw BridgeError(BridgeErrc::ArgumentType, "bad hex digit in payload");
        out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return out;
}

ExportRegistry build() {
    ExportRegistry r;
    using S = SigType;
    auto add = [&r](std::string name, std::vector<S> params, S returns, ExportFn fn) {
        r.add(std::move(name), abi::Signature{std::move(params), returns}, std::move(fn));
    };
    const Value kVoid{};

    // clock and scheduling
    add("now", {}, S::SimTime, [](GuestBridge& b, Args) -> Value { return b.simulation().now(); });
    add("schedule_at", {S::Handle, S::SimTime, S::Handle, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        Module& m = b.module_of(hnd(a, 0));
        if (tm(a, 1) < b.simulation().now()) {
            throw SimError(SimErrc::SchedulingInPast, "schedule_at(" + tm(a, 1).str() + ") is before now (" +
                                                          b.simulation().now().str() + ")");
        }
        const int prio = narrow_int(i64(a, 3), "priority");
        b.simulation().schedule_at(m, tm(a, 1), b.take_message(hnd(a, 2), m), prio);
        return kVoid;
    });
    add("send", {S::Handle, S::Handle, S::String, S::Int64, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        Module& m = b.module_of(hnd(a, 0));
        Gate& g = out_gate(m, str(a, 2), i64(a, 3));
        const int prio = narrow_int(i64(a, 4), "priority");
        b.held_message(hnd(a, 1));
        b.simulation().send(m, b.take_message(hnd(a, 1), m), g, prio);
        return kVoid;
    });
    add("cancel_event", {S::Handle, S::Handle}, S::Handle, [](GuestBridge& b, Args a) -> Value {
        Module& m = b.module_of(hnd(a, 0));
        const MessageId id = b.handles().resolve(hnd(a, 1), HandleKind::Message);
        return b.give_message(b.simulation().cancel_event(m, id), m);
    });

    // gates
    add("gate_lookup", {S::Handle, S::String, S::Int64}, S::Bool, [](GuestBridge& b, Args a) -> Value {
        return b.module_of(hnd(a, 0)).find_gate(str(a, 1), narrow_int(i64(a, 2), "gate index")) != nullptr;
    });
    add("gate_size", {S::Handle, S::String}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        std::int64_t n = 0;
        for (const Gate& g : b.module_of(hnd(a, 0)).gates()) {
            if (g.name() == str(a, 1)) ++n;
        }
        return n;
    });
    add("gate_connected", {S::Handle, S::String, S::Int64}, S::Bool, [](GuestBridge& b, Args a) -> Value {
        const Gate& g = b.module_of(hnd(a, 0)).gate(str(a, 1), narrow_int(i64(a, 2), "gate index"));
        if (g.direction() == GateDirection::Input) return g.previous() != nullptr;
        return g.next() != nullptr;
    });

    // parameters
    add("has_parameter", {S::Handle, S::String}, S::Bool,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).has_par(str(a, 1)); });
    add("get_parameter_int", {S::Handle, S::String}, S::Int64,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).par(str(a, 1)).as_int(); });
    add("get_parameter_double", {S::Handle, S::String}, S::Float64,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).par(str(a, 1)).as_double(); });
    add("get_parameter_string", {S::Handle, S::String}, S::String,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).par(str(a, 1)).as_string(); });
    add("get_parameter_bool", {S::Handle, S::String}, S::Bool,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).par(str(a, 1)).as_bool(); });
    add("get_parameter_time", {S::Handle, S::String}, S::SimTime,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).par(str(a, 1)).as_time(); });

    // output and randomness
    add("record_scalar", {S::Handle, S::String, S::Float64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.simulation().scalars().record(b.module_of(hnd(a, 0)).path(), str(a, 1), ScalarValue(f64(a, 2)));
        return kVoid;
    });
    add("record_scalar_int", {S::Handle, S::String, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.simulation().scalars().record(b.module_of(hnd(a, 0)).path(), str(a, 1), ScalarValue(i64(a, 2)));
        return kVoid;
    });
    add("record_scalar_time", {S::Handle, S::String, S::SimTime}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.simulation().scalars().record(b.module_of(hnd(a, 0)).path(), str(a, 1), ScalarValue(tm(a, 2)));
        return kVoid;
    });
    add("log", {S::Handle, S::String}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.simulation().log(b.module_of(hnd(a, 0)), str(a, 1));
        return kVoid;
    });
    add("module_path", {S::Handle}, S::String,
        [](GuestBridge& b, Args a) -> Value { return b.module_of(hnd(a, 0)).path(); });
    add("rand_uniform", {S::Handle}, S::Float64, [](GuestBridge& b, Args a) -> Value {
        b.module_of(hnd(a, 0));
        return b.simulation().rng().uniform();
    });
    add("rand_below", {S::Handle, S::Int64}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        b.module_of(hnd(a, 0));
        if (i64(a, 1) <= 0) throw BridgeError(BridgeErrc::ArgumentType, "rand_below bound must be positive");
        return static_cast<std::int64_t>(b.simulation().rng().below(static_cast<std::uint64_t>(i64(a, 1))));
    });

    // messages
    add("Message.create", {S::Handle, S::String, S::Int64}, S::Handle, [](GuestBridge& b, Args a) -> Value {
        Module& m = b.module_of(hnd(a, 0));
        return b.give_message(b.simulation().create_message(m, str(a, 1), i64(a, 2)), m);
    });
    add("Message.destroy", {S::Handle}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.destroy_message(hnd(a, 0));
        return kVoid;
    });
    add("Message.dup", {S::Handle, S::Handle}, S::Handle, [](GuestBridge& b, Args a) -> Value {
        Module& m = b.module_of(hnd(a, 0));
        const Message& src = b.held_message(hnd(a, 1));
        MessagePtr copy = b.simulation().create_message(m, src.name(), src.kind());
        copy->set_byte_length(src.byte_length());
        if (src.control_info()) copy->set_control_info(*src.control_info());
        copy->set_payload({src.payload().begin(), src.payload().end()});
        for (const auto& [k, v] : src.attrs()) copy->set_attr(k, v);
        return b.give_message(std::move(copy), m);
    });
    add("Message.id", {S::Handle}, S::Int64,
        [](GuestBridge& b, Args a) -> Value { return static_cast<std::int64_t>(b.held_message(hnd(a, 0)).id()); });
    add("Message.name", {S::Handle}, S::String,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).name(); });
    add("Message.set_name", {S::Handle, S::String}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_name(str(a, 1));
        return kVoid;
    });
    add("Message.kind", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).kind(); });
    add("Message.set_kind", {S::Handle, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_kind(i64(a, 1));
        return kVoid;
    });
    add("Message.byte_length", {S::Handle}, S::Int64,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).byte_length(); });
    add("Message.set_byte_length", {S::Handle, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_byte_length(i64(a, 1));
        return kVoid;
    });
    add("Message.creation_time", {S::Handle}, S::SimTime,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).creation_time(); });
    add("Message.send_time", {S::Handle}, S::SimTime,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).send_time(); });
    add("Message.arrival_time", {S::Handle}, S::SimTime,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).arrival_time(); });
    add("Message.is_self_message", {S::Handle}, S::Bool,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).is_self_message(); });
    add("Message.arrival_gate", {S::Handle}, S::String, [](GuestBridge& b, Args a) -> Value {
        const Message& m = b.held_message(hnd(a, 0));
        if (m.is_self_message() || !m.dst_gate()) return std::string();
        return b.simulation().network().gate(*m.dst_gate()).name();
    });
    add("Message.arrival_gate_index", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        const Message& m = b.held_message(hnd(a, 0));
        if (m.is_self_message() || !m.dst_gate()) return std::int64_t{-1};
        return static_cast<std::int64_t>(b.simulation().network().gate(*m.dst_gate()).index());
    });
    add("Message.has_attr", {S::Handle, S::String}, S::Bool,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).has_attr(str(a, 1)); });
    add("Message.attr", {S::Handle, S::String}, S::Int64,
        [](GuestBridge& b, Args a) -> Value { return b.held_message(hnd(a, 0)).attr(str(a, 1)); });
    add("Message.set_attr", {S::Handle, S::String, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_attr(str(a, 1), i64(a, 2));
        return kVoid;
    });
    add("Message.payload_size", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        return static_cast<std::int64_t>(b.held_message(hnd(a, 0)).payload().size());
    });
    add("Message.payload_byte", {S::Handle, S::Int64}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        const auto bytes = b.held_message(hnd(a, 0)).payload();
        if (i64(a, 1) < 0 || static_cast<std::uint64_t>(i64(a, 1)) >= bytes.size()) {
            throw BridgeError(BridgeErrc::ArgumentType, "payload index " + std::to_string(i64(a, 1)) +
                                                            " outside 0.." + std::to_string(bytes.size()));
        }
        return static_cast<std::int64_t>(bytes[static_cast<std::size_t>(i64(a, 1))]);
    });
    add("Message.set_payload_hex", {S::Handle, S::String}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_payload(from_hex(str(a, 1)));
        return kVoid;
    });
    add("Message.payload_hex", {S::Handle}, S::String,
        [](GuestBridge& b, Args a) -> Value { return to_hex(b.held_message(hnd(a, 0)).payload()); });

    // control info
    add("Message_ControlInfo.kind", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        const auto& ci = b.held_message(hnd(a, 0)).control_info();
        return ci ? static_cast<std::int64_t>(ci->kind) : std::int64_t{0};
    });
    add("Message_ControlInfo.clear", {S::Handle}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).remove_control_info();
        return kVoid;
    });
    add("Message_ControlInfo.set_register_protocol", {S::Handle, S::Int64}, S::Void, [kVoid](GuestBridge& b, Args a) {
        b.held_message(hnd(a, 0)).set_control_info(ControlInfo::register_protocol(i64(a, 1)));
        return kVoid;
    });
    add("Message_ControlInfo.protocol_id", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        const ControlInfo& c = control(b.held_message(hnd(a, 0)));
        if (c.kind != ControlInfo::Kind::RegisterProtocol) {
            throw BridgeError(BridgeErrc::InvalidState, "control info is not a protocol registration");
        }
        return c.protocol_id;
    });
    add("Message_ControlInfo.set_frame_meta", {S::Handle, S::Int64, S::Int64, S::Int64}, S::Void,
        [kVoid](GuestBridge& b, Args a) {
            b.held_message(hnd(a, 0))
                .set_control_info(ControlInfo::frame_meta(MacAddress(static_cast<std::uint64_t>(i64(a, 1))),
                                                          MacAddress(static_cast<std::uint64_t>(i64(a, 2))), i64(a, 3)));
            return kVoid;
        });
    add("Message_ControlInfo.src", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        return static_cast<std::int64_t>(frame_meta(b.held_message(hnd(a, 0))).src.value);
    });
    add("Message_ControlInfo.dst", {S::Handle}, S::Int64, [](GuestBridge& b, Args a) -> Value {
        return static_cast<std::int64_t>(frame_meta(b.held_message(hnd(a, 0))).dst.value);
    });
    add("Message_ControlInfo.ethertype", {S::Handle}, S::Int64,
        [](GuestBridge& b, Args a) -> Value { return frame_meta(b.held_message(hnd(a, 0))).ethertype; });

    // time arithmetic
    add("SimTime.parse", {S::String}, S::SimTime, [](GuestBridge&, Args a) -> Value { return SimTime::parse(str(a, 0)); });
    add("SimTime.str", {S::SimTime}, S::String, [](GuestBridge&, Args a) -> Value { return tm(a, 0).str(); });
    add("SimTime.from_seconds", {S::Float64}, S::SimTime, [](GuestBridge&, Args a) -> Value {
        const double ticks = std::round(f64(a, 0) * static_cast<double>(SimTime::kTicksPerSecond));
        if (!std::isfinite(ticks) || std::fabs(ticks) >= 9.2e18) {
            throw SimError(SimErrc::TimeOverflow, "time of " + std::to_string(f64(a, 0)) + "s is out of range");
        }
        return SimTime::from_ticks(static_cast<std::int64_t>(ticks));
    });
    add("SimTime.seconds", {S::SimTime}, S::Float64, [](GuestBridge&, Args a) -> Value { return tm(a, 0).to_seconds(); });
    const std::vector<S> two{S::SimTime, S::SimTime};
    add("SimTime.plus", two, S::SimTime, [](GuestBridge&, Args a) -> Value { return tm(a, 0) + tm(a, 1); });
    add("SimTime.minus", two, S::SimTime, [](GuestBridge&, Args a) -> Value { return tm(a, 0) - tm(a, 1); });
    add("SimTime.sameAs", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) == tm(a, 1); });
    add("SimTime.differsFrom", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) != tm(a, 1); });
    add("SimTime.lessThan", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) < tm(a, 1); });
    add("SimTime.atMost", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) <= tm(a, 1); });
    add("SimTime.greaterThan", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) > tm(a, 1); });
    add("SimTime.atLeast", two, S::Bool, [](GuestBridge&, Args a) -> Value { return tm(a, 0) >= tm(a, 1); });
    return r;
}

} // namespace

const ExportRegistry& kernel_exports() {
    static const ExportRegistry registry = build();
    return registry;
}

} // namespace polysim::bridge
