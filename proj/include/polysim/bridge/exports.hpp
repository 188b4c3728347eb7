#pragma once

#include "polysim/abi/registration.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polysim::bridge {

class GuestBridge;

using ExportFn = std::function<abi::Value(GuestBridge&, std::span<const abi::Value>)>;

struct ExportEntry {
    std::string name;
    abi::Signature signature;
    ExportFn fn;
};

/// Host functions callable from guest code, keyed by export name.
class ExportRegistry {
public:
    /// Duplicate names are a programming error (std::logic_error).
    void add(std::string name, abi::Signature signature, ExportFn fn);
    const ExportEntry* find(std::string_view name) const noexcept;
    const std::map<std::string, ExportEntry, std::less<>>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Table form, sorted by name.
    abi::RegistrationTable table() const;

private:
    std::map<std::string, ExportEntry, std::less<>> entries_;
};

/// The kernel API as seen by guests. Names and signatures follow
/// api/kernel.manifest after binding generation.
const ExportRegistry& kernel_exports();

struct RegistrationMismatchEntry {
    std::string name;
    /// Signature the host exports, or "unknown export".
    std::string host;
    /// Signature recorded in the guest table, or "missing from guest table".
    std::string guest;
};

struct VerificationReport {
    std::size_t checked = 0;
    std::vector<RegistrationMismatchEntry> mismatches;

    bool ok() const noexcept { return mismatches.empty(); }
    /// One line per mismatch.
    std::string str() const;
};

/// Compares every guest table entry with the host exports. Host exports the
/// guest table does not list are reported as missing.
VerificationReport verify_registrations(const abi::RegistrationTable& guest_table, const ExportRegistry& exports);

} // namespace polysim::bridge
