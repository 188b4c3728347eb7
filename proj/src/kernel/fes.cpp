#include "polysim/kernel/fes.hpp"

#include "polysim/kernel/errors.hpp"

namespace polysim {

FesKey FutureEventSet::insert(SimTime time, int priority, MessagePtr msg) {
    const FesKey key{time, priority, next_seq_++};
    index_.emplace(msg->id(), key);
    entries_.emplace(key, std::move(msg));
    return key;
}

std::optional<FesKey> FutureEventSet::peek() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.begin()->first;
}

FesEntry FutureEventSet::pop() {
    if (entries_.empty()) throw SimError(SimErrc::InvalidState, "pop from an empty future event set");
    auto node = entries_.extract(entries_.begin());
    index_.erase(node.mapped()->id());
    return FesEntry{node.key(), std::move(node.mapped())};
}

std::optional<FesEntry> FutureEventSet::remove(MessageId id) {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    auto node = entries_.extract(it->second);
    index_.erase(it);
    return FesEntry{node.key(), std::move(node.mapped())};
}

} // namespace polysim
