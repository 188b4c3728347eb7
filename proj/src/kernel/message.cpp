#include "polysim/kernel/message.hpp"

#include "polysim/kernel/errors.hpp"

#include <algorithm>

namespace polysim {

std::string Owner::str() const {
    switch (kind_) {
    case Kind::None: return "none";
    case Kind::Fes: return "fes";
    case Kind::Guest: return "guest";
    case Kind::Module: return "module#" + std::to_string(module_);
    }
    return "?";
}

Message::Message(MessageTracker* tracker, MessageId id, std::string name, std::int64_t kind, SimTime now, Owner owner)
    : tracker_(tracker),
      id_(id),
      name_(std::move(name)),
      kind_(kind),
      creation_time_(now),
      send_time_(now),
      arrival_time_(now),
      owner_(owner) {}

Message::~Message() {
    if (tracker_ != nullptr) tracker_->on_destroyed(*this);
}

void Message::set_byte_length(std::int64_t length) {
    if (length < 0) throw SimError(SimErrc::InvalidState, "byte length must be non-negative");
    byte_length_ = length;
}

bool Message::has_attr(std::string_view key) const { return attrs_.find(key) != attrs_.end(); }

std::int64_t Message::attr(std::string_view key) const {
    auto it = attrs_.find(key);
    if (it == attrs_.end()) {
        throw SimError(SimErrc::InvalidState, "message '" + name_ + "' has no attribute '" + std::string(key) + "'");
    }
    return it->second;
}

void Message::erase_attr(std::string_view key) {
    auto it = attrs_.find(key);
    if (it != attrs_.end()) attrs_.erase(it);
}

MessageTracker::~MessageTracker() {
    // Messages that outlive the tracker must not call back into it.
    for (auto& [id, msg] : live_) msg->tracker_ = nullptr;
}

MessagePtr MessageTracker::create(std::string name, std::int64_t kind, SimTime now, Owner owner) {
    const MessageId id = next_id_++;
    MessagePtr msg(new Message(this, id, std::move(name), kind, now, owner));
    live_.emplace(id, msg.get());
    ++stats_.created;
    return msg;
}

void MessageTracker::transfer(Message& msg, Owner from, Owner to) {
    if (msg.owner_ != from) {
        ++stats_.violations;
        throw SimError(SimErrc::NotOwner, "message '" + msg.name_ + "' (id " + std::to_string(msg.id_) +
                                              ") is owned by " + msg.owner_.str() + ", not " + from.str());
    }
    msg.owner_ = to;
    ++stats_.transfers;
}

Message* MessageTracker::find(MessageId id) const {
    auto it = live_.find(id);
    return it == live_.end() ? nullptr : it->second;
}

std::vector<const Message*> MessageTracker::live_messages() const {
    std::vector<const Message*> out;
    out.reserve(live_.size());
    for (const auto& [id, msg] : live_) out.push_back(msg);
    std::sort(out.begin(), out.end(), [](const Message* a, const Message* b) { return a->id() < b->id(); });
    return out;
}

void MessageTracker::on_destroyed(const Message& msg) noexcept {
    live_.erase(msg.id_);
    ++stats_.destroyed;
    for (const auto& [token, listener] : listeners_) listener(msg.id_);
}

std::uint64_t MessageTracker::add_destroy_listener(DestroyListener listener) {
    const auto token = next_listener_++;
    listeners_.emplace_back(token, std::move(listener));
    return token;
}

void MessageTracker::remove_destroy_listener(std::uint64_t token) {
    std::erase_if(listeners_, [token](const auto& entry) { return entry.first == token; });
}

} // namespace polysim
