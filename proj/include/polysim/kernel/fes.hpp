#pragma once

#include "polysim/kernel/message.hpp"
#include "polysim/kernel/simtime.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

namespace polysim {

/// Ordering key of a scheduled event: time, then priority (lower first), then
/// insertion sequence. seq is unique, so no two keys compare equal.
struct FesKey {
    SimTime time;
    int priority = 0;
    std::uint64_t seq = 0;

    friend auto operator<=>(const FesKey&, const FesKey&) = default;
};

struct FesEntry {
    FesKey key;
    MessagePtr message;
};

class FutureEventSet {
public:
    /// Returns the assigned key.
    FesKey insert(SimTime time, int priority, MessagePtr msg);

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    std::optional<FesKey> peek() const;
    FesEntry pop();

    bool contains(MessageId id) const { return index_.contains(id); }
    /// Removes the entry holding message `id`; nullopt if it is not scheduled.
    std::optional<FesEntry> remove(MessageId id);

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [key, msg] : entries_) fn(key, *msg);
    }

private:
    std::map<FesKey, MessagePtr> entries_;
    std::unordered_map<MessageId, FesKey> index_;
    std::uint64_t next_seq_ = 0;
};

} // namespace polysim
