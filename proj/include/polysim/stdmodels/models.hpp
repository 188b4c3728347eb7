#pragma once

#include "polysim/kernel/simple_module.hpp"
#include "polysim/topology/elaborate.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <string_view>
#include <vector>

namespace polysim::stdmodels {

// message kinds used across the library
inline constexpr std::int64_t kKindPing = 1;
inline constexpr std::int64_t kKindPong = 2;
inline constexpr std::int64_t kKindTimer = 3;
inline constexpr std::int64_t kKindRegister = 4;
inline constexpr std::int64_t kKindFrame = 5;
inline constexpr std::int64_t kKindRequest = 6;

// Ethernet framing
inline constexpr std::int64_t kHeaderBytes = 14;
inline constexpr std::int64_t kFcsBytes = 4;
inline constexpr std::int64_t kMinFrameBytes = 64;
inline constexpr std::int64_t kMaxFrameBytes = 1518;
inline constexpr std::int64_t kMaxPayloadBytes = kMaxFrameBytes - kHeaderBytes - kFcsBytes;
inline constexpr std::int64_t kDefaultProtocol = 0x88B5;

// frame header fields travel as message attributes between LinkLayer and MAC
inline constexpr std::string_view kAttrSrc = "eth.src";
inline constexpr std::string_view kAttrDst = "eth.dst";
inline constexpr std::string_view kAttrType = "eth.type";
inline constexpr std::string_view kAttrSeq = "seq";

bool valid_frame_length(std::int64_t byte_length) noexcept;

/// Two-module token bouncer. Exactly one side sets `starter`.
class TicToc : public SimpleModule {
public:
    void validate() override;
    void initialize() override;
    void handle_message(MessagePtr msg) override;
};

class PingClient : public SimpleModule {
public:
    struct Record {
        std::int64_t seq;
        SimTime sent_at;
        SimTime received_at;
        SimTime rtt() const { return received_at - sent_at; }
    };

    void initialize() override;
    void handle_message(MessagePtr msg) override;
    void finish() override;

    const std::vector<Record>& records() const noexcept { return records_; }

private:
    void send_ping();

    SimTime interval_;
    std::int64_t count_ = 0;
    std::int64_t bytes_ = 0;
    std::int64_t next_seq_ = 0;
    std::map<std::int64_t, SimTime> outstanding_;
    std::vector<Record> records_;
};

/// Answers every ping immediately with a pong carrying the same seq.
class PingServer : public SimpleModule {
public:
    void handle_message(MessagePtr msg) override;
    void finish() override;

private:
    std::int64_t answered_ = 0;
};

/// LLC analog: upper-protocol registration, encapsulation and demultiplexing.
class LinkLayer : public SimpleModule {
public:
    void handle_message(MessagePtr msg) override;
    void finish() override;

    const std::map<std::int64_t, int>& registrations() const noexcept { return by_protocol_; }

private:
    void from_upper(MessagePtr msg, int index);
    void from_lower(MessagePtr msg);

    std::map<std::int64_t, int> by_protocol_;
    std::int64_t dropped_ = 0;
    std::int64_t delivered_ = 0;
    std::int64_t sent_ = 0;
};

/// FIFO between LinkLayer and MAC. Hands one frame per MAC request.
class DropTailQueue : public SimpleModule {
public:
    void initialize() override;
    void handle_message(MessagePtr msg) override;
    void finish() override;

    std::size_t length() const noexcept { return queue_.size(); }

private:
    std::deque<MessagePtr> queue_;
    std::int64_t capacity_ = 0;
    bool mac_waiting_ = false;
    std::int64_t dropped_ = 0;
    std::size_t max_length_ = 0;
};

/// Point-to-point full-duplex MAC: pads, serializes at the link datarate and
/// asks the queue for the next frame when the line goes idle.
class SimpleMac : public SimpleModule {
public:
    void initialize() override;
    void handle_message(MessagePtr msg) override;
    void finish() override;

    bool transmitting() const noexcept { return transmitting_; }

private:
    void request_next();

    bool transmitting_ = false;
    MessagePtr tx_done_;
    std::int64_t sent_ = 0;
    std::int64_t received_ = 0;
    std::int64_t invalid_ = 0;
};

/// Registers `protocol_id` at initialize and echoes every payload back with
/// source and destination swapped.
class EchoServer : public SimpleModule {
public:
    void initialize() override;
    void handle_message(MessagePtr msg) override;
};

/// Sends `count` payloads to `dest` and checks the echoes byte for byte.
class EtherClient : public SimpleModule {
public:
    void initialize() override;
    void handle_message(MessagePtr msg) override;
    void finish() override;

    static std::vector<std::uint8_t> payload_for(std::int64_t seq, std::int64_t size);

private:
    std::int64_t address_ = 0;
    std::int64_t dest_ = 0;
    std::int64_t protocol_ = 0;
    std::int64_t count_ = 0;
    std::int64_t bytes_ = 0;
    SimTime interval_;
    std::int64_t next_seq_ = 0;
    std::int64_t echoed_ = 0;
    std::int64_t mismatched_ = 0;
    std::map<std::int64_t, SimTime> outstanding_;
    SimTime rtt_sum_;
};

/// Declarations of every library type, in topology DSL form.
std::string_view library_source();

/// Adds the library declarations and native factories to `registry`.
void register_stdmodels(topo::ModuleTypeRegistry& registry);

} // namespace polysim::stdmodels
