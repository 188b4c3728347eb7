#include "polysim/bindgen/bindgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace polysim::bindgen {

const char* to_string(BindErrc code) noexcept {
    switch (code) {
    case BindErrc::SyntaxError: return "SyntaxError";
    case BindErrc::DuplicateEntry: return "DuplicateEntry";
    case BindErrc::UnmappableOperator: return "UnmappableOperator";
    case BindErrc::CollisionUnresolvable: return "CollisionUnresolvable";
    }
    return "?";
}

BindgenError::BindgenError(BindErrc code, const std::string& what, int line)
    : std::runtime_error(std::string(to_string(code)) + (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
                         ": " + what),
      code_(code),
      line_(line) {}

std::string ManifestEntry::qualified() const {
    std::string out;
    if (ns) out += *ns + "::";
    if (nested_in) out += *nested_in + "::";
    if (owner_class) out += *owner_class + "::";
    out += native_name;
    if (op) out += *op;
    out += "(" + abi::Signature{params, returns}.params_str() + ")";
    return out;
}

namespace {

std::vector<std::string> split_fields(std::string_view line, int line_no) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::string field;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            if (line[i] == '"') {
                ++i;
                while (i < line.size() && line[i] != '"') field += line[i++];
                if (i >= line.size()) throw BindgenError(BindErrc::SyntaxError, "unterminated quote", line_no);
                ++i;
            } else {
                field += line[i++];
            }
        }
        out.push_back(std::move(field));
    }
    return out;
}

bool identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

using Identity = std::tuple<std::string, std::string, std::string, std::string, std::string, std::string>;

Identity identity_of(const ManifestEntry& e) {
    return {e.ns.value_or(""),      e.nested_in.value_or(""), e.owner_class.value_or(""),
            e.native_name,          e.op.value_or(""),        abi::Signature{e.params, e.returns}.params_str()};
}

} // namespace

ApiManifest load_manifest(std::string_view text) {
    ApiManifest manifest;
    std::set<Identity> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos && line.substr(0, hash).find('"') == std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto fields = split_fields(line, line_no);
        if (fields.empty()) continue;
        if (fields[0] != "entry") {
            throw BindgenError(BindErrc::SyntaxError, "line must start with 'entry'", line_no);
        }
        ManifestEntry e;
        e.line = line_no;
        bool have_name = false, have_params = false, have_returns = false;
        std::set<std::string> keys;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto eq = fields[i].find('=');
            if (eq == std::string::npos) {
                throw BindgenError(BindErrc::SyntaxError, "expected key=value, got '" + fields[i] + "'", line_no);
            }
            const std::string key = fields[i].substr(0, eq);
            const std::string value = fields[i].substr(eq + 1);
            if (!keys.insert(key).second) throw BindgenError(BindErrc::SyntaxError, "repeated key '" + key + "'", line_no);
            if (key == "ns" || key == "class" || key == "nested" || key == "name") {
                if (!identifier(value)) {
                    throw BindgenError(BindErrc::SyntaxError, key + " must be an identifier, got '" + value + "'",
                                       line_no);
                }
            }
            if (key == "ns") {
                e.ns = value;
            } else if (key == "class") {
                e.owner_class = value;
            } else if (key == "nested") {
                e.nested_in = value;
            } else if (key == "name") {
                e.native_name = value;
                have_name = true;
            } else if (key == "op") {
                if (value.empty()) throw BindgenError(BindErrc::SyntaxError, "empty operator symbol", line_no);
                e.op = value;
            } else if (key == "params") {
                try {
                    e.params = abi::parse_param_list(value);
                } catch (const std::invalid_argument& err) {
                    throw BindgenError(BindErrc::SyntaxError, err.what(), line_no);
                }
                have_params = true;
            } else if (key == "returns") {
                const auto t = abi::sig_type_from(value);
                if (!t) throw BindgenError(BindErrc::SyntaxError, "bad return type '" + value + "'", line_no);
                e.returns = *t;
                have_returns = true;
            } else {
                throw BindgenError(BindErrc::SyntaxError, "unknown key '" + key + "'", line_no);
            }
        }
        if (!have_name) throw BindgenError(BindErrc::SyntaxError, "missing name", line_no);
        if (!have_params) throw BindgenError(BindErrc::SyntaxError, "missing params", line_no);
        if (!have_returns) throw BindgenError(BindErrc::SyntaxError, "missing returns", line_no);
        if (e.nested_in && !e.owner_class) {
            throw BindgenError(BindErrc::SyntaxError, "nested requires class", line_no);
        }
        if (e.op.has_value() != (e.native_name == "operator")) {
            throw BindgenError(BindErrc::SyntaxError, "op is required exactly when name=operator", line_no);
        }
        if (!seen.insert(identity_of(e)).second) {
            throw BindgenError(BindErrc::DuplicateEntry, "duplicate entry " + e.qualified(), line_no);
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

ApiManifest load_manifest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BindgenError(BindErrc::SyntaxError, "cannot read manifest " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_manifest(buf.str());
}

std::string map_operator(std::string_view symbol) {
    static const std::map<std::string, std::string, std::less<>> kTable = {
        {"=", "set"},       {"==", "sameAs"},     {"!=", "differsFrom"}, {"++", "incr"},
        {"--", "decr"},     {"+", "plus"},        {"-", "minus"},        {"<", "lessThan"},
        {"<=", "atMost"},   {">", "greaterThan"}, {">=", "atLeast"},     {"[]", "at"},
    };
    auto it = kTable.find(symbol);
    if (it == kTable.end()) {
        throw BindgenError(BindErrc::UnmappableOperator, "no guest name for operator '" + std::string(symbol) + "'");
    }
    return it->second;
}

std::string map_name(const ManifestEntry& entry) {
    if (entry.op) {
        try {
            return map_operator(*entry.op);
        } catch (const BindgenError& e) {
            throw BindgenError(e.code(), "no guest name for operator '" + *entry.op + "' in " + entry.qualified(),
                               entry.line);
        }
    }
    return entry.native_name;
}

std::string MappedEntry::export_name() const {
    const auto& cls = guest_class();
    return cls ? *cls + "." + guest_name : guest_name;
}

MappedApi map_api(const ApiManifest& manifest) {
    MappedApi api;
    for (const auto& e : manifest.entries) {
        MappedEntry m;
        m.source = e;
        m.guest_name = map_name(e);
        if (e.nested_in) m.hoisted_class = *e.nested_in + "_" + *e.owner_class;
        api.entries.push_back(std::move(m));
    }

    using Key = std::tuple<std::string, std::string, std::string>;
    auto key_of = [](const MappedEntry& m) {
        return Key{m.guest_class().value_or(""), m.guest_name, abi::Signature{m.source.params, {}}.params_str()};
    };

    std::map<Key, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < api.entries.size(); ++i) groups[key_of(api.entries[i])].push_back(i);
    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        std::set<std::string> namespaces;
        for (std::size_t i : members) {
            const auto& ns = api.entries[i].source.ns;
            if (!ns || !namespaces.insert(*ns).second) {
                throw BindgenError(BindErrc::CollisionUnresolvable,
                                   api.entries[i].source.qualified() + " collides with another entry and has no "
                                                                       "distinguishing namespace",
                                   api.entries[i].source.line);
            }
        }
        for (std::size_t i : members) {
            auto& m = api.entries[i];
            m.guest_name = *m.source.ns + "_" + m.guest_name;
        }
    }

    // after repair every export name must be unique; overloads and repaired
    // names that hit an existing one both land here
    std::map<std::string, const MappedEntry*> by_export;
    for (const auto& m : api.entries) {
        auto [it, fresh] = by_export.emplace(m.export_name(), &m);
        if (!fresh) {
            throw BindgenError(BindErrc::CollisionUnresolvable,
                               m.source.qualified() + " and " + it->second->source.qualified() +
                                   " both map to guest name '" + m.export_name() + "'",
                               m.source.line);
        }
    }

    std::stable_sort(api.entries.begin(), api.entries.end(),
                     [&](const MappedEntry& a, const MappedEntry& b) { return key_of(a) < key_of(b); });
    return api;
}

namespace {

const std::set<std::string, std::less<>> kPythonKeywords = {
    "False", "None",   "True",    "and",   "as",       "assert", "async",  "await",    "break",
    "class", "continue", "def",   "del",   "elif",     "else",   "except", "finally",  "for",
    "from",  "global", "if",      "import", "in",      "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return", "try",     "while",  "with",   "yield"};

std::string py_name(const std::string& name) { return kPythonKeywords.count(name) ? name + "_" : name; }

std::string arg_list(std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += ", ";
        out += "a" + std::to_string(i);
    }
    return out;
}

const char* kHeader = R"py(# Generated by bindgen from the kernel API manifest. Do not edit.
"""Guest-side wrappers for the exported kernel API.

Every wrapper forwards to the host by export name; arguments and results
cross the boundary as the types listed in the registration table.
"""

try:
    from _polysim_host import bind_peer as _bind_peer
    from _polysim_host import call as _call
except ImportError:  # imported outside the simulator
    def _outside(*_args):
        raise RuntimeError("polysim guest code can only run inside the simulator "
                           "(no host bridge is available in this process)")

    _bind_peer = _outside
    _call = _outside

)py";

const char* kSkeleton = R"py(

class SimpleModuleBase:
    """Base class for guest simple modules.

    Construction binds the new object to its host-side module shell before
    any subclass code runs; constructing one outside the simulator fails.
    """

    def __init__(self):
        self._host_handle = _bind_peer(self)

    @property
    def host_handle(self):
        return self._host_handle

    def initialize(self):
        pass

    def handle_message(self, msg):
        raise NotImplementedError(type(self).__name__ + " must override handle_message()")

    def finish(self):
        pass

    def _on_host_call(self, which, msg):
        if which == "initialize":
            self.initialize()
        elif which == "handle_message":
            self.handle_message(msg)
        elif which == "finish":
            self.finish()
        else:
            raise ValueError("unknown host callback " + repr(which))
)py";

} // namespace

Generated generate(const ApiManifest& manifest) {
    const MappedApi api = map_api(manifest);
    Generated out;
    std::string& s = out.stub_source;
    s = kHeader;
    s += "EXPORT_COUNT = " + std::to_string(api.entries.size()) + "\n";

    std::optional<std::string> open_class;
    for (const auto& m : api.entries) {
        const auto& cls = m.guest_class();
        const abi::Signature sig{m.source.params, m.source.returns};
        const std::string args = arg_list(sig.params.size());
        const std::string doc = m.export_name() + sig.str() + "  [" + m.source.qualified() + "]";
        if (cls != open_class) {
            if (cls) {
                s += "\n\nclass " + *cls + ":\n";
                s += "    \"\"\"Wrappers for " + *cls + " exports.\"\"\"\n";
            }
            open_class = cls;
        }
        if (cls) {
            s += "\n    @staticmethod\n";
            s += "    def " + py_name(m.guest_name) + "(" + args + "):\n";
            s += "        \"\"\"" + doc + "\"\"\"\n";
            s += "        return _call(\"" + m.export_name() + "\"" + (args.empty() ? "" : ", " + args) + ")\n";
        } else {
            s += "\n\ndef " + py_name(m.guest_name) + "(" + args + "):\n";
            s += "    \"\"\"" + doc + "\"\"\"\n";
            s += "    return _call(\"" + m.export_name() + "\"" + (args.empty() ? "" : ", " + args) + ")\n";
        }
        out.table.entries.push_back(abi::RegistrationEntry{m.export_name(), sig});
        ++out.stub_count;
    }
    s += kSkeleton;
    return out;
}

} // namespace polysim::bindgen
