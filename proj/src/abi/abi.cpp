#include "polysim/abi/registration.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace polysim::abi {

const char* to_string(SigType t) noexcept {
    switch (t) {
    case SigType::Int64: return "int64";
    case SigType::Float64: return "float64";
    case SigType::String: return "string";
    case SigType::Bool: return "bool";
    case SigType::Handle: return "handle";
    case SigType::SimTime: return "simtime";
    case SigType::Void: return "void";
    }
    return "?";
}

std::optional<SigType> sig_type_from(std::string_view text) noexcept {
    static constexpr SigType kAll[] = {SigType::Int64,  SigType::Float64, SigType::String, SigType::Bool,
                                       SigType::Handle, SigType::SimTime, SigType::Void};
    for (SigType t : kAll) {
        if (text == to_string(t)) return t;
    }
    return std::nullopt;
}

std::string Signature::params_str() const {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) out += ",";
        out += to_string(params[i]);
    }
    return out;
}

std::string Signature::str() const { return "(" + params_str() + ") -> " + to_string(returns); }

std::vector<SigType> parse_param_list(std::string_view text) {
    std::vector<SigType> out;
    if (text.empty() || text == "void") return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        const auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        const auto t = sig_type_from(part);
        if (!t || *t == SigType::Void) throw std::invalid_argument("bad parameter type '" + std::string(part) + "'");
        out.push_back(*t);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

SigType type_of(const Value& v) noexcept {
    switch (v.index()) {
    case 0: return SigType::Void;
    case 1: return SigType::Int64;
    case 2: return SigType::Float64;
    case 3: return SigType::String;
    case 4: return SigType::Bool;
    case 5: return SigType::Handle;
    default: return SigType::SimTime;
    }
}

std::string describe(const Value& v) {
    struct V {
        std::string operator()(std::monostate) const { return "void"; }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(double x) const { return std::to_string(x); }
        std::string operator()(const std::string& x) const { return "\"" + x + "\""; }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(Handle h) const { return "handle#" + std::to_string(h.value); }
        std::string operator()(SimTime t) const { return t.str_with_unit(); }
    };
    return std::visit(V{}, v);
}

const RegistrationEntry* RegistrationTable::find(std::string_view name) const noexcept {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

RegistrationTable parse_table(std::string_view text) {
    RegistrationTable table;
    std::set<std::string, std::less<>> names;
    int line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab2 == std::string_view::npos || line.find('\t', tab2 + 1) != std::string_view::npos) {
            throw TableFormatError(line_no, "expected three tab-separated fields");
        }
        RegistrationEntry e;
        e.name = std::string(line.substr(0, tab1));
        if (e.name.empty()) throw TableFormatError(line_no, "empty export name");
        try {
            e.signature.params = parse_param_list(line.substr(tab1 + 1, tab2 - tab1 - 1));
        } catch (const std::invalid_argument& err) {
            throw TableFormatError(line_no, err.what());
        }
        const auto ret = sig_type_from(line.substr(tab2 + 1));
        if (!ret) throw TableFormatError(line_no, "bad return type '" + std::string(line.substr(tab2 + 1)) + "'");
        e.signature.returns = *ret;
        if (!names.insert(e.name).second) throw TableFormatError(line_no, "duplicate export '" + e.name + "'");
        table.entries.push_back(std::move(e));
    }
    return table;
}

std::string format_table(const RegistrationTable& table) {
    std::string out;
    for (const auto& e : table.entries) {
        out += e.name + "\t" + e.signature.params_str() + "\t" + to_string(e.signature.returns) + "\n";
    }
    return out;
}

RegistrationTable load_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read registration table " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str());
}

} // namespace polysim::abi
