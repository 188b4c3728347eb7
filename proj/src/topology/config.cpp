#include "polysim/topology/config.hpp"

#include "polysim/kernel/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace polysim::topo {

const ConfigSection* Config::find(std::string_view name) const noexcept {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Drops a `#` comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && quoted) {
            ++i;
        } else if (s[i] == '"') {
            quoted = !quoted;
        } else if (s[i] == '#' && !quoted) {
            return s.substr(0, i);
        }
    }
    return s;
}

bool valid_section_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

class ConfigParser {
public:
    explicit ConfigParser(std::string origin) { config_.origin = std::move(origin); }

    Config run(std::string_view text) {
        int line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            ++line_no;
            line(text.substr(start, end - start), line_no);
            start = end + 1;
        }
        return std::move(config_);
    }

private:
    [[noreturn]] void fail(TopoErrc code, const std::string& msg, SourcePos pos) const {
        throw TopologyError(code, msg, config_.origin, pos);
    }

    ConfigSection& current(SourcePos pos) {
        if (config_.sections.empty()) {
            // entries before the first header belong to General
            ConfigSection general;
            general.name = "General";
            general.pos = pos;
            config_.sections.push_back(std::move(general));
            seen_.insert("General");
        }
        return config_.sections.back();
    }

    void line(std::string_view raw, int line_no) {
        const std::string_view text = trim(strip_comment(raw));
        if (text.empty()) return;
        const int column = static_cast<int>(raw.find_first_not_of(" \t") + 1);
        const SourcePos pos{line_no, column};
        if (text.front() == '[') {
            header(text, pos);
            return;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) fail(TopoErrc::SyntaxError, "expected 'key = value'", pos);
        const std::string key(trim(text.substr(0, eq)));
        const std::string value(trim(text.substr(eq + 1)));
        if (key.empty()) fail(TopoErrc::SyntaxError, "missing key before '='", pos);
        if (value.empty()) fail(TopoErrc::SyntaxError, "missing value for '" + key + "'", pos);
        entry(current(pos), key, value, pos);
    }

    void header(std::string_view text, SourcePos pos) {
        if (text.back() != ']') fail(TopoErrc::SyntaxError, "section header must end with ']'", pos);
        const std::string_view inner = trim(text.substr(1, text.size() - 2));
        ConfigSection section;
        section.pos = pos;
        const auto colon = inner.find(':');
        section.name = std::string(trim(inner.substr(0, colon)));
        if (colon != std::string_view::npos) section.parent = std::string(trim(inner.substr(colon + 1)));
        if (!valid_section_name(section.name) || (section.parent && !valid_section_name(*section.parent))) {
            fail(TopoErrc::SyntaxError, "malformed section header", pos);
        }
        if (section.name == "General" && section.parent) {
            fail(TopoErrc::SyntaxError, "section General cannot extend another section", pos);
        }
        if (!seen_.insert(section.name).second) {
            fail(TopoErrc::DuplicateSection, "section '" + section.name + "' appears twice", pos);
        }
        config_.sections.push_back(std::move(section));
    }

    template <typename T>
    void set_once(std::optional<T>& slot, T value, const std::string& key, SourcePos pos) {
        if (slot) fail(TopoErrc::DuplicateName, "key '" + key + "' set twice in one section", pos);
        slot = std::move(value);
    }

    std::uint64_t unsigned_value(const std::string& key, const std::string& value, SourcePos pos) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size()) {
            fail(TopoErrc::SyntaxError, "'" + key + "' needs a non-negative integer, got '" + value + "'", pos);
        }
        return v;
    }

    static std::string unquote(const std::string& value) {
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') return value.substr(1, value.size() - 2);
        return value;
    }

    void entry(ConfigSection& s, const std::string& key, const std::string& value, SourcePos pos) {
        if (key.find_first_of(".*") != std::string::npos) {
            s.params.push_back(ParamAssignment{key, value, s.name, pos});
            return;
        }
        if (key == "network") {
            set_once(s.network, unquote(value), key, pos);
        } else if (key == "sim-time-limit") {
            try {
                set_once(s.time_limit, SimTime::parse(value), key, pos);
            } catch (const SimError& e) {
                const bool unit_problem =
                    e.code() == SimErrc::TimeMissingUnit || e.code() == SimErrc::TimeUnknownUnit;
                fail(unit_problem ? TopoErrc::UnknownUnit : TopoErrc::SyntaxError, e.what(), pos);
            }
        } else if (key == "event-limit") {
            set_once(s.event_limit, unsigned_value(key, value, pos), key, pos);
        } else if (key == "seed") {
            set_once(s.seed, unsigned_value(key, value, pos), key, pos);
        } else if (key == "guest-runtime") {
            const std::string v = unquote(value);
            if (v != "python" && v != "inprocess") {
                fail(TopoErrc::SyntaxError, "guest-runtime must be 'python' or 'inprocess'", pos);
            }
            set_once(s.guest_runtime, v, key, pos);
        } else if (key == "guest-runtime-path") {
            set_once(s.guest_runtime_path, unquote(value), key, pos);
        } else if (key == "guest-module-path") {
            std::vector<std::string> dirs;
            const std::string joined = unquote(value);
            std::string_view rest = joined;
            for (;;) {
                const auto colon = rest.find(':');
                const auto part = trim(rest.substr(0, colon));
                if (!part.empty()) dirs.emplace_back(part);
                if (colon == std::string_view::npos) break;
                rest.remove_prefix(colon + 1);
            }
            set_once(s.guest_module_path, std::move(dirs), key, pos);
        } else if (key == "guest-sdk-check") {
            const std::string v = unquote(value);
            if (v != "strict" && v != "off") fail(TopoErrc::SyntaxError, "guest-sdk-check must be 'strict' or 'off'", pos);
            set_once(s.guest_sdk_check, v == "strict", key, pos);
        } else {
            fail(TopoErrc::UnknownKey, "unknown configuration key '" + key + "'", pos);
        }
    }

    Config config_;
    std::set<std::string, std::less<>> seen_;
};

bool match_from(std::string_view p, std::string_view s) noexcept {
    while (!p.empty()) {
        if (p.substr(0, 2) == "**") {
            p.remove_prefix(2);
            for (std::size_t i = 0; i <= s.size(); ++i) {
                if (match_from(p, s.substr(i))) return true;
            }
            return false;
        }
        if (p.front() == '*') {
            p.remove_prefix(1);
            for (std::size_t i = 0; i <= s.size(); ++i) {
                if (match_from(p, s.substr(i))) return true;
                if (i < s.size() && s[i] == '.') return false;
            }
            return false;
        }
        if (s.empty() || s.front() != p.front()) return false;
        p.remove_prefix(1);
        s.remove_prefix(1);
    }
    return s.empty();
}

} // namespace

Config parse_config(std::string_view text, std::string origin) { return ConfigParser(std::move(origin)).run(text); }

Config parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TopologyError(TopoErrc::SyntaxError, "cannot read configuration file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

bool pattern_match(std::string_view pattern, std::string_view path) noexcept { return match_from(pattern, path); }

const ParamAssignment* RunSettings::lookup(std::string_view parameter_path) const noexcept {
    for (const auto& a : params) {
        if (pattern_match(a.pattern, parameter_path)) return &a;
    }
    return nullptr;
}

RunSettings resolve(const Config& config, std::string_view section) {
    RunSettings out;
    out.section = std::string(section);
    std::vector<const ConfigSection*> chain;
    std::set<std::string, std::less<>> visited;
    std::optional<std::string> next = std::string(section);
    while (next) {
        const ConfigSection* s = config.find(*next);
        if (s == nullptr) {
            if (*next == "General") break;
            throw TopologyError(TopoErrc::UnknownSection, "no section named '" + *next + "'", config.origin);
        }
        if (!visited.insert(s->name).second) {
            throw TopologyError(TopoErrc::SyntaxError, "section inheritance cycle through '" + s->name + "'",
                                config.origin, s->pos);
        }
        chain.push_back(s);
        if (s->parent) {
            next = s->parent;
        } else if (s->name != "General") {
            next = "General";
        } else {
            next.reset();
        }
    }
    std::optional<bool> sdk_check;
    for (const ConfigSection* s : chain) {
        if (!out.network && s->network) out.network = s->network;
        if (!out.time_limit && s->time_limit) out.time_limit = s->time_limit;
        if (!out.event_limit && s->event_limit) out.event_limit = s->event_limit;
        if (!out.seed && s->seed) out.seed = s->seed;
        if (out.guest.runtime.empty() && s->guest_runtime) out.guest.runtime = *s->guest_runtime;
        if (out.guest.runtime_path.empty() && s->guest_runtime_path) out.guest.runtime_path = *s->guest_runtime_path;
        if (out.guest.module_path.empty() && s->guest_module_path) out.guest.module_path = *s->guest_module_path;
        if (!sdk_check && s->guest_sdk_check) sdk_check = s->guest_sdk_check;
        out.params.insert(out.params.end(), s->params.begin(), s->params.end());
    }
    out.guest.verify_registrations = sdk_check.value_or(true);
    return out;
}

} // namespace polysim::topo
