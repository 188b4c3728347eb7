#pragma once

#include "polysim/abi/registration.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polysim::bindgen {

enum class BindErrc { SyntaxError, DuplicateEntry, UnmappableOperator, CollisionUnresolvable };

const char* to_string(BindErrc code) noexcept;

class BindgenError : public std::runtime_error {
public:
    BindgenError(BindErrc code, const std::string& what, int line = 0);
    BindErrc code() const noexcept { return code_; }
    /// Manifest line, 0 when not tied to one line.
    int line() const noexcept { return line_; }

private:
    BindErrc code_;
    int line_;
};

struct ManifestEntry {
    std::optional<std::string> ns;
    std::optional<std::string> owner_class;
    /// Enclosing class when owner_class is nested.
    std::optional<std::string> nested_in;
    std::string native_name;
    std::optional<std::string> op;
    std::vector<abi::SigType> params;
    abi::SigType returns = abi::SigType::Void;
    int line = 0;

    bool is_operator() const noexcept { return op.has_value(); }
    /// `ns::Outer::Inner::name` plus the operator symbol, for diagnostics.
    std::string qualified() const;
};

struct ApiManifest {
    std::vector<ManifestEntry> entries;
};

/// Line format:
///   entry ns=<ns> class=<cls> nested=<outer> name=<name> op="<sym>" params=<t1,t2> returns=<t>
/// `ns`, `class`, `nested` and `op` are optional; values may be double-quoted.
/// Blank lines and `#` comments are ignored.
ApiManifest load_manifest(std::string_view text);
ApiManifest load_manifest_file(const std::string& path);

/// Operator symbol to guest method name; UnmappableOperator otherwise.
std::string map_operator(std::string_view symbol);

/// Guest name before collision repair: operator table, then the native name.
std::string map_name(const ManifestEntry& entry);

struct MappedEntry {
    ManifestEntry source;
    std::string guest_name;
    /// Outer_Inner for nested classes.
    std::optional<std::string> hoisted_class;

    /// Class the wrapper lives in on the guest side (hoisted or owner), if any.
    const std::optional<std::string>& guest_class() const noexcept {
        return hoisted_class ? hoisted_class : source.owner_class;
    }
    /// Name used in the registration table and by the export registry.
    std::string export_name() const;
};

struct MappedApi {
    /// Sorted by (class, guest_name, params).
    std::vector<MappedEntry> entries;
};

/// Applies operator mapping, nested-class hoisting, namespace stripping and
/// collision repair. Throws UnmappableOperator or CollisionUnresolvable.
MappedApi map_api(const ApiManifest& manifest);

struct Generated {
    std::string stub_source;
    abi::RegistrationTable table;
    std::size_t stub_count = 0;
};

/// Python stub module plus the registration table covering exactly the
/// emitted wrappers. Output is a pure function of the manifest.
Generated generate(const ApiManifest& manifest);

} // namespace polysim::bindgen
