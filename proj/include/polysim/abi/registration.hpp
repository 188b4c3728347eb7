#pragma once

#include "polysim/abi/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polysim::abi {

struct RegistrationEntry {
    std::string name;
    Signature signature;
    friend bool operator==(const RegistrationEntry&, const RegistrationEntry&) = default;
};

/// The guest-visible export list. Text form: one `name<TAB>params<TAB>returns`
/// line per entry, params comma-separated.
struct RegistrationTable {
    std::vector<RegistrationEntry> entries;
    friend bool operator==(const RegistrationTable&, const RegistrationTable&) = default;

    const RegistrationEntry* find(std::string_view name) const noexcept;
};

class TableFormatError : public std::runtime_error {
public:
    TableFormatError(int line, const std::string& what)
        : std::runtime_error("registration table line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Throws TableFormatError on malformed lines or duplicate names.
RegistrationTable parse_table(std::string_view text);
std::string format_table(const RegistrationTable& table);
RegistrationTable load_table_file(const std::string& path);

} // namespace polysim::abi
