#include "polysim/bridge/exports.hpp"

#include <set>
#include <stdexcept>

namespace polysim::bridge {

void ExportRegistry::add(std::string name, abi::Signature signature, ExportFn fn) {
    auto key = name;
    const bool fresh = entries_.emplace(std::move(key), ExportEntry{std::move(name), std::move(signature), std::move(fn)})
                           .second;
    if (!fresh) throw std::logic_error("export registered twice");
}

const ExportEntry* ExportRegistry::find(std::string_view name) const noexcept {
    const auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
}

abi::RegistrationTable ExportRegistry::table() const {
    abi::RegistrationTable t;
    for (const auto& [name, e] : entries_) t.entries.push_back({name, e.signature});
    return t;
}

std::string VerificationReport::str() const {
    std::string out;
    for (const auto& m : mismatches) {
        out += "  " + m.name + ": host " + m.host + ", guest " + m.guest + "\n";
    }
    return out;
}

VerificationReport verify_registrations(const abi::RegistrationTable& guest_table, const ExportRegistry& exports) {
    VerificationReport report;
    std::set<std::string, std::less<>> listed;
    for (const auto& g : guest_table.entries) {
        ++report.checked;
        listed.insert(g.name);
        const ExportEntry* host = exports.find(g.name);
        if (host == nullptr) {
            report.mismatches.push_back({g.name, "unknown export", g.signature.str()});
        } else if (host->signature != g.signature) {
            report.mismatches.push_back({g.name, host->signature.str(), g.signature.str()});
        }
    }
    for (const auto& [name, e] : exports.entries()) {
        if (!listed.count(name)) report.mismatches.push_back({name, e.signature.str(), "missing from guest table"});
    }
    return report;
}

} // namespace polysim::bridge
