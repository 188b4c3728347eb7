#pragma once

#include "polysim/abi/types.hpp"

#include <cstdint>
#include <unordered_map>

namespace polysim::bridge {

enum class HandleKind { HostModule, GuestObject, Message };

const char* to_string(HandleKind kind) noexcept;

/// Issues opaque handles for objects that cross the boundary. Values come
/// from one counter starting at 1 and are never reused, so a released handle
/// can always be told apart from a live one.
class HandleRegistry {
public:
    abi::Handle allocate(HandleKind kind, std::uint64_t target);

    /// Target of a live handle of the given kind. StaleHandle if the handle
    /// was released or never issued, ArgumentType if it names another kind.
    std::uint64_t resolve(abi::Handle h, HandleKind kind) const;

    bool live(abi::Handle h) const noexcept { return live_.count(h.value) != 0; }
    void release(abi::Handle h) noexcept { live_.erase(h.value); }
    void release_all() noexcept { live_.clear(); }

    std::size_t live_count() const noexcept { return live_.size(); }
    /// Number of handles ever issued.
    std::uint64_t issued() const noexcept { return next_ - 1; }

private:
    struct Slot {
        HandleKind kind;
        std::uint64_t target;
    };
    std::unordered_map<std::uint64_t, Slot> live_;
    std::uint64_t next_ = 1;
};

} // namespace polysim::bridge
