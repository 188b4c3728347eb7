#pragma once

#include "polysim/kernel/control_info.hpp"
#include "polysim/kernel/simtime.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace polysim {

using MessageId = std::uint64_t;
using ModuleId = std::int32_t;

/// Slot of a gate inside its module's gate table.
struct GateRef {
    ModuleId module = -1;
    std::uint32_t slot = 0;

    friend bool operator==(const GateRef&, const GateRef&) = default;
};

/// Who currently holds a message. Exactly one at any instant.
class Owner {
public:
    enum class Kind { None, Module, Fes, Guest };

    static constexpr Owner none() { return Owner(Kind::None, -1); }
    static constexpr Owner fes() { return Owner(Kind::Fes, -1); }
    static constexpr Owner guest() { return Owner(Kind::Guest, -1); }
    static constexpr Owner module(ModuleId id) { return Owner(Kind::Module, id); }

    constexpr Kind kind() const { return kind_; }
    constexpr ModuleId module_id() const { return module_; }
    std::string str() const;

    friend constexpr bool operator==(Owner, Owner) = default;

private:
    constexpr Owner(Kind k, ModuleId m) : kind_(k), module_(m) {}
    Kind kind_;
    ModuleId module_;
};

class MessageTracker;

class Message {
public:
    Message(const Message&) = delete;
    Message& operator=(const Message&) = delete;
    ~Message();

    MessageId id() const noexcept { return id_; }

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    std::int64_t kind() const noexcept { return kind_; }
    void set_kind(std::int64_t kind) noexcept { kind_ = kind; }

    SimTime creation_time() const noexcept { return creation_time_; }
    SimTime send_time() const noexcept { return send_time_; }
    SimTime arrival_time() const noexcept { return arrival_time_; }

    const std::optional<GateRef>& src_gate() const noexcept { return src_gate_; }
    const std::optional<GateRef>& dst_gate() const noexcept { return dst_gate_; }
    /// True for a message last scheduled with schedule_at rather than sent over a gate.
    bool is_self_message() const noexcept { return self_; }

    Owner owner() const noexcept { return owner_; }

    const std::optional<ControlInfo>& control_info() const noexcept { return control_info_; }
    void set_control_info(ControlInfo info) { control_info_ = info; }
    std::optional<ControlInfo> remove_control_info() { return std::exchange(control_info_, std::nullopt); }

    std::span<const std::uint8_t> payload() const noexcept { return payload_; }
    void set_payload(std::vector<std::uint8_t> bytes) { payload_ = std::move(bytes); }

    std::int64_t byte_length() const noexcept { return byte_length_; }
    void set_byte_length(std::int64_t length);

    bool has_attr(std::string_view key) const;
    std::int64_t attr(std::string_view key) const;
    void set_attr(std::string key, std::int64_t value) { attrs_[std::move(key)] = value; }
    void erase_attr(std::string_view key);
    const std::map<std::string, std::int64_t, std::less<>>& attrs() const noexcept { return attrs_; }

private:
    friend class MessageTracker;
    friend class Simulation;

    Message(MessageTracker* tracker, MessageId id, std::string name, std::int64_t kind, SimTime now, Owner owner);

    MessageTracker* tracker_;
    MessageId id_;
    std::string name_;
    std::int64_t kind_;
    SimTime creation_time_;
    SimTime send_time_;
    SimTime arrival_time_;
    std::optional<GateRef> src_gate_;
    std::optional<GateRef> dst_gate_;
    bool self_ = false;
    ModuleId target_ = -1;
    Owner owner_;
    std::optional<ControlInfo> control_info_;
    std::vector<std::uint8_t> payload_;
    std::int64_t byte_length_ = 0;
    std::map<std::string, std::int64_t, std::less<>> attrs_;
};

using MessagePtr = std::unique_ptr<Message>;

/// Counters of the ownership audit.
struct OwnershipStats {
    std::uint64_t created = 0;
    std::uint64_t destroyed = 0;
    std::uint64_t transfers = 0;
    std::uint64_t violations = 0;
};

/// Creates messages, hands out run-unique ids and audits every ownership
/// transfer. Every live message of a run is indexed here.
class MessageTracker {
public:
    MessageTracker() = default;
    MessageTracker(const MessageTracker&) = delete;
    MessageTracker& operator=(const MessageTracker&) = delete;
    ~MessageTracker();

    MessagePtr create(std::string name, std::int64_t kind, SimTime now, Owner owner);

    /// Moves `msg` from `from` to `to`. Throws SimError(NotOwner) and counts a
    /// violation if the message is not currently held by `from`.
    void transfer(Message& msg, Owner from, Owner to);

    Message* find(MessageId id) const;
    std::size_t live_count() const noexcept { return live_.size(); }
    const OwnershipStats& stats() const noexcept { return stats_; }

    /// Live messages in id order.
    std::vector<const Message*> live_messages() const;

    using DestroyListener = std::function<void(MessageId)>;
    /// Listeners run for every destroyed message and must not throw.
    std::uint64_t add_destroy_listener(DestroyListener listener);
    void remove_destroy_listener(std::uint64_t token);

private:
    friend class Message;
    void on_destroyed(const Message& msg) noexcept;

    std::unordered_map<MessageId, Message*> live_;
    std::vector<std::pair<std::uint64_t, DestroyListener>> listeners_;
    std::uint64_t next_listener_ = 1;
    MessageId next_id_ = 1;
    OwnershipStats stats_;
};

} // namespace polysim
