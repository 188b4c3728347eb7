#include "polysim/stdmodels/models.hpp"

#include "polysim/kernel/errors.hpp"
#include "polysim/kernel/simulation.hpp"

#include <algorithm>

namespace polysim::stdmodels {

namespace {

const Gate& arrival_gate(const SimpleModule& self, const Message& msg) {
    if (!msg.dst_gate()) throw SimError(SimErrc::InvalidState, "message " + msg.name() + " has no arrival gate");
    return self.sim().network().gate(*msg.dst_gate());
}

[[noreturn]] void violation(const Module& m, const std::string& what) {
    throw SimError(SimErrc::InvalidState, m.path() + ": " + what);
}

} // namespace

bool valid_frame_length(std::int64_t byte_length) noexcept {
    return byte_length >= kMinFrameBytes && byte_length <= kMaxFrameBytes;
}

// ---- TicToc

void TicToc::validate() {
    const Gate& out = gate("out");
    const Gate* end = out.path_end();
    if (end == &out) violation(module(), "out gate is not connected");
    const Module& peer = end->owner();
    if (!peer.has_par("starter")) return;
    const bool mine = par("starter").as_bool();
    if (mine == peer.par("starter").as_bool()) {
        throw SimError(SimErrc::ValidationFailure,
                       "exactly one of " + module().path() + " and " + peer.path() + " must set starter (" +
                           (mine ? "both do" : "neither does") + ")");
    }
}

void TicToc::initialize() {
    if (par("starter").as_bool()) send(new_message("token"), "out");
}

void TicToc::handle_message(MessagePtr msg) { send(std::move(msg), "out"); }

// ---- ping

void PingClient::initialize() {
    interval_ = par("interval").as_time();
    count_ = par("count").as_int();
    bytes_ = par("packetBytes").as_int();
    if (count_ > 0) schedule_at(SimTime::zero(), new_message("pingTimer", kKindTimer));
}

void PingClient::send_ping() {
    auto ping = new_message("ping", kKindPing);
    ping->set_attr(std::string(kAttrSeq), next_seq_);
    ping->set_byte_length(bytes_);
    outstanding_[next_seq_] = now();
    ++next_seq_;
    send(std::move(ping), "out");
}

void PingClient::handle_message(MessagePtr msg) {
    if (msg->is_self_message()) {
        send_ping();
        if (next_seq_ < count_) schedule_at(interval_ * next_seq_, std::move(msg));
        return;
    }
    if (msg->kind() != kKindPong) violation(module(), "unexpected message '" + msg->name() + "'");
    const std::int64_t seq = msg->attr(kAttrSeq);
    const auto it = outstanding_.find(seq);
    if (it == outstanding_.end()) violation(module(), "pong with unknown seq " + std::to_string(seq));
    records_.push_back({seq, it->second, now()});
    outstanding_.erase(it);
}

void PingClient::finish() {
    record_scalar("pings_sent", next_seq_);
    record_scalar("pongs_received", static_cast<std::int64_t>(records_.size()));
    if (records_.empty()) return;
    SimTime lo = records_.front().rtt(), hi = lo, sum;
    for (const auto& r : records_) {
        lo = std::min(lo, r.rtt());
        hi = std::max(hi, r.rtt());
        sum += r.rtt();
    }
    record_scalar("rtt_min", lo);
    record_scalar("rtt_avg", sum / static_cast<std::int64_t>(records_.size()));
    record_scalar("rtt_max", hi);
}

void PingServer::handle_message(MessagePtr msg) {
    if (msg->kind() != kKindPing) violation(module(), "unexpected message '" + msg->name() + "'");
    msg->set_name("pong");
    msg->set_kind(kKindPong);
    ++answered_;
    send(std::move(msg), "out");
}

void PingServer::finish() { record_scalar("pings_answered", answered_); }

// ---- link layer

void LinkLayer::handle_message(MessagePtr msg) {
    const Gate& in = arrival_gate(*this, *msg);
    if (in.name() == "upperIn") {
        from_upper(std::move(msg), in.index());
    } else {
        from_lower(std::move(msg));
    }
}

void LinkLayer::from_upper(MessagePtr msg, int index) {
    const auto& ci = msg->control_info();
    if (!ci) violation(module(), "message '" + msg->name() + "' from upper layer carries no control info");
    if (ci->kind == ControlInfo::Kind::RegisterProtocol) {
        const auto [it, fresh] = by_protocol_.emplace(ci->protocol_id, index);
        if (!fresh && it->second != index) {
            violation(module(), "protocol " + std::to_string(ci->protocol_id) + " registered from upperIn[" +
                                    std::to_string(index) + "] but already bound to upperIn[" +
                                    std::to_string(it->second) + "]");
        }
        return;
    }
    const auto payload = static_cast<std::int64_t>(msg->payload().size());
    if (payload > kMaxPayloadBytes) {
        violation(module(), "payload of " + std::to_string(payload) + " bytes exceeds one frame");
    }
    const ControlInfo meta = *msg->remove_control_info();
    msg->set_attr(std::string(kAttrSrc), static_cast<std::int64_t>(meta.src.value));
    msg->set_attr(std::string(kAttrDst), static_cast<std::int64_t>(meta.dst.value));
    msg->set_attr(std::string(kAttrType), meta.ethertype);
    msg->set_byte_length(kHeaderBytes + payload + kFcsBytes);
    ++sent_;
    send(std::move(msg), "lowerOut");
}

void LinkLayer::from_lower(MessagePtr msg) {
    const std::int64_t type = msg->attr(kAttrType);
    const auto it = by_protocol_.find(type);
    if (it == by_protocol_.end()) {
        ++dropped_;
        return;
    }
    const auto src = static_cast<std::uint64_t>(msg->attr(kAttrSrc));
    const auto dst = static_cast<std::uint64_t>(msg->attr(kAttrDst));
    msg->erase_attr(kAttrSrc);
    msg->erase_attr(kAttrDst);
    msg->erase_attr(kAttrType);
    msg->set_control_info(ControlInfo::frame_meta(MacAddress(src), MacAddress(dst), type));
    msg->set_byte_length(static_cast<std::int64_t>(msg->payload().size()));
    ++delivered_;
    send(std::move(msg), "upperOut", it->second);
}

void LinkLayer::finish() {
    record_scalar("frames_sent", sent_);
    record_scalar("frames_delivered", delivered_);
    record_scalar("frames_dropped_unregistered", dropped_);
}

// ---- queue and MAC

void DropTailQueue::initialize() { capacity_ = par("capacity").as_int(); }

void DropTailQueue::handle_message(MessagePtr msg) {
    if (arrival_gate(*this, *msg).name() == "reqIn") {
        if (queue_.empty()) {
            mac_waiting_ = true;
        } else {
            send(std::move(queue_.front()), "out");
            queue_.pop_front();
        }
        return;  // the request message is consumed here
    }
    if (mac_waiting_) {
        mac_waiting_ = false;
        send(std::move(msg), "out");
        return;
    }
    if (capacity_ > 0 && static_cast<std::int64_t>(queue_.size()) >= capacity_) {
        ++dropped_;
        return;
    }
    queue_.push_back(std::move(msg));
    max_length_ = std::max(max_length_, queue_.size());
}

void DropTailQueue::finish() {
    record_scalar("dropped", dropped_);
    record_scalar("max_length", static_cast<std::int64_t>(max_length_));
}

void SimpleMac::initialize() {
    tx_done_ = new_message("txDone", kKindTimer);
    request_next();
}

void SimpleMac::request_next() { send(new_message("request", kKindRequest), "reqOut"); }

void SimpleMac::handle_message(MessagePtr msg) {
    if (msg->is_self_message()) {
        transmitting_ = false;
        tx_done_ = std::move(msg);
        request_next();
        return;
    }
    const std::string& in = arrival_gate(*this, *msg).name();
    if (in == "phyIn") {
        if (!valid_frame_length(msg->byte_length())) {
            ++invalid_;
            return;
        }
        ++received_;
        send(std::move(msg), "upperOut");
        return;
    }
    if (transmitting_) violation(module(), "frame handed down while the line is busy");
    msg->set_byte_length(std::max(msg->byte_length(), kMinFrameBytes));
    Gate& phy = gate("phyOut");
    const SimTime done = now() + sim().transmission_duration(phy, msg->byte_length());
    transmitting_ = true;
    ++sent_;
    send(std::move(msg), phy);
    schedule_at(done, std::move(tx_done_));
}

void SimpleMac::finish() {
    record_scalar("frames_sent", sent_);
    record_scalar("frames_received", received_);
    record_scalar("frames_invalid", invalid_);
}

// ---- applications

void EchoServer::initialize() {
    auto reg = new_message("register", kKindRegister);
    reg->set_control_info(ControlInfo::register_protocol(par("protocolId").as_int()));
    send(std::move(reg), "out");
}

void EchoServer::handle_message(MessagePtr msg) {
    const auto& ci = msg->control_info();
    if (!ci || ci->kind != ControlInfo::Kind::FrameMeta) violation(module(), "payload without frame metadata");
    msg->set_control_info(ControlInfo::frame_meta(ci->dst, ci->src, ci->ethertype));
    send(std::move(msg), "out");
}

std::vector<std::uint8_t> EtherClient::payload_for(std::int64_t seq, std::int64_t size) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(size));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((static_cast<std::int64_t>(i) * 31 + seq * 7 + 1) & 0xFF);
    }
    return out;
}

void EtherClient::initialize() {
    address_ = par("address").as_int();
    dest_ = par("dest").as_int();
    protocol_ = par("protocolId").as_int();
    count_ = par("count").as_int();
    bytes_ = par("payloadBytes").as_int();
    interval_ = par("interval").as_time();
    if (bytes_ < 0 || bytes_ > kMaxPayloadBytes) violation(module(), "payloadBytes out of range");

    auto reg = new_message("register", kKindRegister);
    reg->set_control_info(ControlInfo::register_protocol(protocol_));
    send(std::move(reg), "out");
    if (count_ > 0) schedule_at(SimTime::zero(), new_message("sendTimer", kKindTimer));
}

void EtherClient::handle_message(MessagePtr msg) {
    if (msg->is_self_message()) {
        auto frame = new_message("frame", kKindFrame);
        frame->set_attr(std::string(kAttrSeq), next_seq_);
        frame->set_payload(payload_for(next_seq_, bytes_));
        frame->set_byte_length(bytes_);
        frame->set_control_info(
            ControlInfo::frame_meta(MacAddress(static_cast<std::uint64_t>(address_)),
                                    MacAddress(static_cast<std::uint64_t>(dest_)), protocol_));
        outstanding_[next_seq_] = now();
        ++next_seq_;
        send(std::move(frame), "out");
        if (next_seq_ < count_) schedule_at(interval_ * next_seq_, std::move(msg));
        return;
    }
    const auto& ci = msg->control_info();
    const std::int64_t seq = msg->has_attr(kAttrSeq) ? msg->attr(kAttrSeq) : -1;
    const auto it = outstanding_.find(seq);
    const auto expected = payload_for(seq, bytes_);
    const bool ok = ci && ci->kind == ControlInfo::Kind::FrameMeta && ci->src.value == MacAddress(dest_).value &&
                    ci->dst.value == MacAddress(address_).value && it != outstanding_.end() &&
                    std::equal(expected.begin(), expected.end(), msg->payload().begin(), msg->payload().end());
    if (!ok) {
        ++mismatched_;
        return;
    }
    rtt_sum_ += now() - it->second;
    outstanding_.erase(it);
    ++echoed_;
}

void EtherClient::finish() {
    record_scalar("frames_sent", next_seq_);
    record_scalar("echoes_ok", echoed_);
    record_scalar("echoes_bad", mismatched_);
    if (echoed_ > 0) record_scalar("rtt_avg", rtt_sum_ / echoed_);
}

} // namespace polysim::stdmodels
