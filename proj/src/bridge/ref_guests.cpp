// Reference guest classes for the in-process runtime. Each one talks to the
// kernel only through exports, by name, the way generated stubs do.

#include "polysim/bridge/inprocess.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace polysim::bridge {

namespace {

using abi::Handle;
using abi::Value;

constexpr std::int64_t kScalar = -1;

class TicTocGuest : public InProcessGuest {
public:
    using InProcessGuest::InProcessGuest;

    void initialize() override {
        if (call_as<bool>("get_parameter_bool", {host_handle(), std::string("starter")})) {
            const auto msg = call_as<Handle>("Message.create", {host_handle(), std::string("token"), std::int64_t{0}});
            forward(msg);
        }
    }
    void handle_message(Handle msg) override { forward(msg); }

private:
    void forward(Handle msg) { call("send", {host_handle(), msg, std::string("out"), kScalar, std::int64_t{0}}); }
};

class PingClientGuest : public InProcessGuest {
public:
    using InProcessGuest::InProcessGuest;

    void initialize() override {
        interval_ = call_as<SimTime>("get_parameter_time", {host_handle(), std::string("interval")});
        count_ = call_as<std::int64_t>("get_parameter_int", {host_handle(), std::string("count")});
        bytes_ = call_as<std::int64_t>("get_parameter_int", {host_handle(), std::string("packetBytes")});
        if (count_ > 0) {
            const auto timer = call_as<Handle>("Message.create", {host_handle(), std::string("pingTimer"), std::int64_t{3}});
            call("schedule_at", {host_handle(), SimTime::zero(), timer, std::int64_t{0}});
        }
    }

    void handle_message(Handle msg) override {
        if (call_as<bool>("Message.is_self_message", {msg})) {
            const auto ping = call_as<Handle>("Message.create", {host_handle(), std::string("ping"), std::int64_t{1}});
            call("Message.set_attr", {ping, std::string("seq"), next_seq_});
            call("Message.set_byte_length", {ping, bytes_});
            sent_at_[next_seq_] = call_as<SimTime>("now");
            ++next_seq_;
            call("send", {host_handle(), ping, std::string("out"), kScalar, std::int64_t{0}});
            if (next_seq_ < count_) call("schedule_at", {host_handle(), interval_ * next_seq_, msg, std::int64_t{0}});
            return;
        }
        if (call_as<std::int64_t>("Message.kind", {msg}) != 2) throw std::runtime_error("unexpected message");
        const auto seq = call_as<std::int64_t>("Message.attr", {msg, std::string("seq")});
        const auto it = sent_at_.find(seq);
        if (it == sent_at_.end()) throw std::runtime_error("pong with unknown seq " + std::to_string(seq));
        rtts_.push_back(call_as<SimTime>("now") - it->second);
        sent_at_.erase(it);
        call("Message.destroy", {msg});
    }

    void finish() override {
        call("record_scalar_int", {host_handle(), std::string("pings_sent"), next_seq_});
        call("record_scalar_int",
             {host_handle(), std::string("pongs_received"), static_cast<std::int64_t>(rtts_.size())});
        if (rtts_.empty()) return;
        SimTime sum;
        for (SimTime r : rtts_) sum += r;
        call("record_scalar_time", {host_handle(), std::string("rtt_min"), *std::min_element(rtts_.begin(), rtts_.end())});
        call("record_scalar_time",
             {host_handle(), std::string("rtt_avg"), sum / static_cast<std::int64_t>(rtts_.size())});
        call("record_scalar_time", {host_handle(), std::string("rtt_max"), *std::max_element(rtts_.begin(), rtts_.end())});
    }

private:
    SimTime interval_;
    std::int64_t count_ = 0;
    std::int64_t bytes_ = 0;
    std::int64_t next_seq_ = 0;
    std::map<std::int64_t, SimTime> sent_at_;
    std::vector<SimTime> rtts_;
};

class EchoServerGuest : public InProcessGuest {
public:
    using InProcessGuest::InProcessGuest;

    void initialize() override {
        const auto pid = call_as<std::int64_t>("get_parameter_int", {host_handle(), std::string("protocolId")});
        const auto reg = call_as<Handle>("Message.create", {host_handle(), std::string("register"), std::int64_t{4}});
        call("Message_ControlInfo.set_register_protocol", {reg, pid});
        call("send", {host_handle(), reg, std::string("out"), kScalar, std::int64_t{0}});
    }

    void handle_message(Handle msg) override {
        const auto src = call_as<std::int64_t>("Message_ControlInfo.src", {msg});
        const auto dst = call_as<std::int64_t>("Message_ControlInfo.dst", {msg});
        const auto type = call_as<std::int64_t>("Message_ControlInfo.ethertype", {msg});
        call("Message_ControlInfo.set_frame_meta", {msg, dst, src, type});
        call("send", {host_handle(), msg, std::string("out"), kScalar, std::int64_t{0}});
    }
};

template <class T>
InProcessFactory make() {
    return [](InProcessRuntime& rt) { return std::make_unique<T>(rt); };
}

} // namespace

void register_reference_guests(InProcessRuntime& runtime) {
    runtime.register_class("ref.TicTocGuest", make<TicTocGuest>());
    runtime.register_class("ref.PingClientGuest", make<PingClientGuest>());
    runtime.register_class("ref.EchoServerGuest", make<EchoServerGuest>());
}

} // namespace polysim::bridge
