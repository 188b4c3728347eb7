#pragma once

#include <cstdint>

namespace polysim {

/// 48-bit link-layer address stored in the low bits of a 64-bit integer.
struct MacAddress {
    std::uint64_t value = 0;

    static constexpr std::uint64_t kMask = 0xFFFF'FFFF'FFFFULL;

    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::uint64_t v) : value(v & kMask) {}

    friend constexpr bool operator==(MacAddress, MacAddress) = default;
};

/// Side-band information attached to a message for the adjacent layer.
struct ControlInfo {
    enum class Kind : std::int64_t { RegisterProtocol = 1, FrameMeta = 2 };

    Kind kind = Kind::FrameMeta;
    std::int64_t protocol_id = 0; // RegisterProtocol
    MacAddress src;              // FrameMeta
    MacAddress dst;              // FrameMeta
    std::int64_t ethertype = 0;  // FrameMeta

    static ControlInfo register_protocol(std::int64_t protocol_id) {
        ControlInfo c;
        c.kind = Kind::RegisterProtocol;
        c.protocol_id = protocol_id;
        return c;
    }
    static ControlInfo frame_meta(MacAddress src, MacAddress dst, std::int64_t ethertype) {
        ControlInfo c;
        c.kind = Kind::FrameMeta;
        c.src = src;
        c.dst = dst;
        c.ethertype = ethertype;
        return c;
    }

    friend bool operator==(const ControlInfo&, const ControlInfo&) = default;
};

} // namespace polysim
