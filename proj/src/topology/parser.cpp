#include "polysim/topology/parser.hpp"

#include "polysim/kernel/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace polysim::topo {

namespace {

enum class Tok { Ident, Number, String, Punct, Arrow, At, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier, punctuation, annotation name, or number digits
    std::string unit;  // number suffix, e.g. "ms"
    std::string value; // decoded string literal
    SourcePos pos;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Number: return "number '" + t.text + t.unit + "'";
    case Tok::String: return "string literal";
    case Tok::Punct: return "'" + t.text + "'";
    case Tok::Arrow: return "'-->'";
    case Tok::At: return "'@" + t.text + "'";
    case Tok::End: return "end of input";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    Lexer(std::string_view text, const std::string& origin) : text_(text), origin_(origin) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.pos = {line_, col_};
            if (at_end()) {
                out.push_back(t);
                return out;
            }
            const char c = peek();
            if (ident_start(c)) {
                t.kind = Tok::Ident;
                while (!at_end() && ident_char(peek())) t.text.push_back(get());
            } else if (digit(c) || (c == '-' && digit(peek(1))) || (c == '.' && digit(peek(1)))) {
                lex_number(t);
            } else if (c == '"') {
                lex_string(t);
            } else if (c == '-' && peek(1) == '-' && peek(2) == '>') {
                get(), get(), get();
                t.kind = Tok::Arrow;
                t.text = "-->";
            } else if (c == '@') {
                get();
                if (at_end() || !ident_start(peek())) fail("expected annotation name after '@'", t.pos);
                t.kind = Tok::At;
                while (!at_end() && ident_char(peek())) t.text.push_back(get());
            } else if (std::string_view("{}[]();:.=<>,").find(c) != std::string_view::npos) {
                t.kind = Tok::Punct;
                t.text.push_back(get());
            } else {
                fail(std::string("unexpected character '") + c + "'", t.pos);
            }
            out.push_back(std::move(t));
        }
    }

private:
    bool at_end() const { return i_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }
    char get() {
        const char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg, SourcePos pos) const {
        throw TopologyError(TopoErrc::SyntaxError, msg, origin_, pos);
    }

    void skip_space() {
        while (!at_end()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    void lex_number(Token& t) {
        t.kind = Tok::Number;
        if (peek() == '-') t.text.push_back(get());
        while (digit(peek())) t.text.push_back(get());
        if (peek() == '.' && digit(peek(1))) {
            t.text.push_back(get());
            while (digit(peek())) t.text.push_back(get());
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && digit(peek(2))))) {
            t.text.push_back(get());
            if (peek() == '-' || peek() == '+') t.text.push_back(get());
            while (digit(peek())) t.text.push_back(get());
        }
        while (ident_char(peek())) t.unit.push_back(get());
    }

    void lex_string(Token& t) {
        t.kind = Tok::String;
        get();
        for (;;) {
            if (at_end() || peek() == '\n') fail("unterminated string literal", t.pos);
            const char c = get();
            if (c == '"') break;
            if (c == '\\') {
                if (at_end()) fail("unterminated string literal", t.pos);
                const char e = get();
                switch (e) {
                case 'n': t.value.push_back('\n'); break;
                case 't': t.value.push_back('\t'); break;
                case '"': t.value.push_back('"'); break;
                case '\\': t.value.push_back('\\'); break;
                default: fail(std::string("unknown escape '\\") + e + "'", t.pos);
                }
            } else {
                t.value.push_back(c);
            }
        }
    }

    std::string_view text_;
    const std::string& origin_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

const std::set<std::string, std::less<>> kReserved = {"parameters", "gates", "submodules", "connections",
                                                      "simple", "module", "network"};

const std::set<std::string, std::less<>> kSectionNames = {"parameters", "gates", "submodules", "connections"};

std::optional<ParamType> param_type_of(std::string_view word) {
    if (word == "int") return ParamType::Int;
    if (word == "double") return ParamType::Double;
    if (word == "string") return ParamType::String;
    if (word == "bool") return ParamType::Bool;
    if (word == "time") return ParamType::Time;
    return std::nullopt;
}

/// Multiplies a non-negative decimal (digits with optional fraction) by 10^exp
/// and requires an integral result.
std::optional<std::int64_t> scaled_integer(std::string_view number, int exp) {
    const auto dot = number.find('.');
    std::string digits(number.substr(0, dot));
    std::string frac = dot == std::string_view::npos ? "" : std::string(number.substr(dot + 1));
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (static_cast<int>(frac.size()) > exp) return std::nullopt;
    digits += frac;
    digits.append(static_cast<std::size_t>(exp) - frac.size(), '0');
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || p != digits.data() + digits.size()) return std::nullopt;
    return v;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string origin) : toks_(std::move(tokens)), origin_(std::move(origin)) {}

    TopologyAst file() {
        TopologyAst ast;
        std::set<std::string, std::less<>> names;
        while (cur().kind != Tok::End) {
            ModuleDecl decl = declaration();
            if (!names.insert(decl.name).second) duplicate("declaration", decl.name, decl.pos);
            ast.decls.push_back(std::move(decl));
        }
        return ast;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& ahead(std::size_t n) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
    Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool is_word(std::string_view w) const { return cur().kind == Tok::Ident && cur().text == w; }

    [[noreturn]] void expected(std::vector<std::string> what) const {
        throw TopologyError(TopoErrc::SyntaxError, "unexpected " + describe(cur()), origin_, cur().pos,
                            std::move(what));
    }
    [[noreturn]] void duplicate(std::string_view what, const std::string& name, SourcePos pos) const {
        throw TopologyError(TopoErrc::DuplicateName, "duplicate " + std::string(what) + " '" + name + "'", origin_,
                            pos);
    }

    void punct(std::string_view p) {
        if (!is_punct(p)) expected({"'" + std::string(p) + "'"});
        take();
    }

    std::string name(const char* what) {
        if (cur().kind != Tok::Ident) expected({what});
        if (kReserved.count(cur().text)) {
            throw TopologyError(TopoErrc::SyntaxError, "'" + cur().text + "' is reserved", origin_, cur().pos,
                                {what});
        }
        return take().text;
    }

    int literal_size() {
        if (cur().kind != Tok::Number || !cur().unit.empty()) expected({"vector size"});
        const Token t = take();
        int v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size() || v < 0) {
            throw TopologyError(TopoErrc::SyntaxError, "vector size must be a non-negative integer", origin_, t.pos);
        }
        return v;
    }

    std::optional<int> opt_index() {
        if (!is_punct("[")) return std::nullopt;
        take();
        const int v = literal_size();
        punct("]");
        return v;
    }

    ParamValue literal() {
        const Token& t = cur();
        if (t.kind == Tok::String) return ParamValue(take().value);
        if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) return ParamValue(take().text == "true");
        if (t.kind != Tok::Number) expected({"literal"});
        const Token n = take();
        if (!n.unit.empty()) {
            const int exp = SimTime::unit_exponent(n.unit);
            if (exp < 0) {
                throw TopologyError(TopoErrc::UnknownUnit, "unknown time unit '" + n.unit + "'", origin_, n.pos);
            }
            try {
                return ParamValue(SimTime::from_decimal(n.text, exp));
            } catch (const SimError& e) {
                throw TopologyError(TopoErrc::SyntaxError, e.what(), origin_, n.pos);
            }
        }
        const bool floating = n.text.find_first_of(".eE") != std::string::npos;
        const char* b = n.text.data();
        const char* e = b + n.text.size();
        if (floating) {
            double d = 0;
            auto [p, ec] = std::from_chars(b, e, d);
            if (ec != std::errc{} || p != e) {
                throw TopologyError(TopoErrc::SyntaxError, "bad number '" + n.text + "'", origin_, n.pos);
            }
            return ParamValue(d);
        }
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || p != e) {
            throw TopologyError(TopoErrc::SyntaxError, "integer out of range '" + n.text + "'", origin_, n.pos);
        }
        return ParamValue(v);
    }

    ModuleDecl declaration() {
        ModuleDecl decl;
        decl.pos = cur().pos;
        if (is_word("simple")) {
            decl.kind = DeclKind::Simple;
        } else if (is_word("module")) {
            decl.kind = DeclKind::Compound;
        } else if (is_word("network")) {
            decl.kind = DeclKind::Network;
        } else {
            expected({"'simple'", "'module'", "'network'"});
        }
        take();
        decl.name = name("module type name");
        punct("{");
        enum class Section { None, Parameters, Gates, Submodules, Connections } section = Section::None;
        std::set<std::string, std::less<>> params, gates, subs;
        while (!is_punct("}")) {
            if (cur().kind == Tok::At && cur().text == "class") {
                const SourcePos at = take().pos;
                if (!decl.is_simple()) {
                    throw TopologyError(TopoErrc::SyntaxError, "@class is only allowed in simple modules", origin_,
                                        at);
                }
                punct("(");
                if (cur().kind != Tok::String) expected({"implementation name string"});
                decl.implementation = take().value;
                punct(")");
                punct(";");
                continue;
            }
            if (cur().kind == Tok::Ident && kSectionNames.count(cur().text) && ahead(1).kind == Tok::Punct &&
                ahead(1).text == ":") {
                const Token word = take();
                take();
                if (word.text == "parameters") section = Section::Parameters;
                if (word.text == "gates") section = Section::Gates;
                if (word.text == "submodules" || word.text == "connections") {
                    if (decl.is_simple()) {
                        throw TopologyError(TopoErrc::SyntaxError,
                                            "simple modules cannot have " + word.text, origin_, word.pos);
                    }
                    section = word.text == "submodules" ? Section::Submodules : Section::Connections;
                }
                continue;
            }
            switch (section) {
            case Section::None:
                expected({"'parameters:'", "'gates:'", "'submodules:'", "'connections:'", "'}'"});
            case Section::Parameters: {
                auto p = param_decl();
                if (!params.insert(p.name).second) duplicate("parameter", p.name, p.pos);
                decl.parameters.push_back(std::move(p));
                break;
            }
            case Section::Gates: {
                auto g = gate_decl();
                if (!gates.insert(g.name).second) duplicate("gate", g.name, g.pos);
                decl.gates.push_back(std::move(g));
                break;
            }
            case Section::Submodules: {
                auto s = submodule();
                if (!subs.insert(s.name).second) duplicate("submodule", s.name, s.pos);
                decl.submodules.push_back(std::move(s));
                break;
            }
            case Section::Connections: decl.connections.push_back(connection()); break;
            }
        }
        take();
        return decl;
    }

    ParamDecl param_decl() {
        ParamDecl p;
        p.pos = cur().pos;
        const auto type = cur().kind == Tok::Ident ? param_type_of(cur().text) : std::nullopt;
        if (!type) expected({"parameter type (int, double, string, bool, time)", "section name"});
        take();
        p.type = *type;
        p.name = name("parameter name");
        if (is_punct("=")) {
            take();
            p.default_value = literal();
        }
        punct(";");
        return p;
    }

    GateDecl gate_decl() {
        GateDecl g;
        g.pos = cur().pos;
        if (is_word("input")) {
            g.direction = GateDirection::Input;
        } else if (is_word("output")) {
            g.direction = GateDirection::Output;
        } else {
            expected({"'input'", "'output'", "section name"});
        }
        take();
        g.name = name("gate name");
        g.vector_size = opt_index();
        if (cur().kind == Tok::At) {
            if (cur().text != "required") expected({"'@required'", "';'"});
            take();
            g.required = true;
        }
        punct(";");
        return g;
    }

    SubmoduleDecl submodule() {
        SubmoduleDecl s;
        s.pos = cur().pos;
        s.name = name("submodule name");
        s.vector_size = opt_index();
        punct(":");
        if (is_punct("<")) {
            take();
            s.type = name("parameter name");
            s.type_from_param = true;
            punct(">");
        } else {
            s.type = name("module type name");
        }
        if (is_word("like")) {
            take();
            s.like = name("interface type name");
        }
        if (is_punct("{")) {
            take();
            std::set<std::string, std::less<>> seen;
            while (!is_punct("}")) {
                ParamAssign a;
                a.pos = cur().pos;
                a.name = name("parameter name");
                punct("=");
                a.value = literal();
                punct(";");
                if (!seen.insert(a.name).second) duplicate("parameter assignment", a.name, a.pos);
                s.assignments.push_back(std::move(a));
            }
            take();
            if (is_punct(";")) take();
        } else {
            punct(";");
        }
        return s;
    }

    Endpoint endpoint() {
        Endpoint e;
        e.pos = cur().pos;
        const std::string first = name("submodule or gate name");
        const auto first_index = opt_index();
        if (is_punct(".")) {
            take();
            e.submodule = first;
            e.submodule_index = first_index;
            e.gate = name("gate name");
            e.gate_index = opt_index();
        } else {
            e.gate = first;
            e.gate_index = first_index;
        }
        return e;
    }

    ChannelSpec channel() {
        ChannelSpec c;
        punct("{");
        while (!is_punct("}")) {
            if (cur().kind != Tok::Ident || (cur().text != "delay" && cur().text != "datarate")) {
                expected({"'delay'", "'datarate'", "'}'"});
            }
            const Token key = take();
            punct("=");
            if (cur().kind != Tok::Number) expected({key.text == "delay" ? "time literal" : "datarate literal"});
            const Token v = take();
            if ((key.text == "delay" && c.delay) || (key.text == "datarate" && c.datarate)) {
                duplicate("channel attribute", key.text, key.pos);
            }
            if (key.text == "delay") {
                const int exp = SimTime::unit_exponent(v.unit);
                if (v.unit.empty() || exp < 0) {
                    throw TopologyError(TopoErrc::UnknownUnit, "delay '" + v.text + v.unit + "' needs a time unit",
                                        origin_, v.pos);
                }
                try {
                    c.delay = SimTime::from_decimal(v.text, exp);
                } catch (const SimError& e) {
                    throw TopologyError(TopoErrc::SyntaxError, e.what(), origin_, v.pos);
                }
                if (*c.delay < SimTime()) {
                    throw TopologyError(TopoErrc::SyntaxError, "delay must not be negative", origin_, v.pos);
                }
            } else {
                int exp = -1;
                if (v.unit == "bps") exp = 0;
                if (v.unit == "kbps") exp = 3;
                if (v.unit == "Mbps") exp = 6;
                if (v.unit == "Gbps") exp = 9;
                if (exp < 0) {
                    throw TopologyError(TopoErrc::UnknownUnit,
                                        "datarate '" + v.text + v.unit + "' needs a unit (bps, kbps, Mbps, Gbps)",
                                        origin_, v.pos);
                }
                const auto bps = v.text.find_first_of("-eE") == std::string::npos ? scaled_integer(v.text, exp)
                                                                                    : std::nullopt;
                if (!bps || *bps <= 0) {
                    throw TopologyError(TopoErrc::SyntaxError,
                                        "datarate must be a positive whole number of bits per second", origin_, v.pos);
                }
                c.datarate = *bps;
            }
            punct(";");
        }
        take();
        return c;
    }

    Connection connection() {
        Connection c;
        c.pos = cur().pos;
        c.from = endpoint();
        if (cur().kind != Tok::Arrow) expected({"'-->'"});
        take();
        if (is_punct("{")) {
            c.channel = channel();
            if (cur().kind != Tok::Arrow) expected({"'-->'"});
            take();
        }
        c.to = endpoint();
        punct(";");
        return c;
    }

public:
    ParamValue single_literal() {
        ParamValue v = literal();
        if (cur().kind != Tok::End) expected({"end of value"});
        return v;
    }

private:
    std::vector<Token> toks_;
    std::string origin_;
    std::size_t i_ = 0;
};

} // namespace

TopologyAst parse_topology(std::string_view text, std::string origin) {
    auto tokens = Lexer(text, origin).run();
    return Parser(std::move(tokens), std::move(origin)).file();
}

ParamValue parse_literal(std::string_view text) {
    auto tokens = Lexer(text, {}).run();
    return Parser(std::move(tokens), {}).single_literal();
}

TopologyAst parse_topology_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TopologyError(TopoErrc::SyntaxError, "cannot read topology file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_topology(buf.str(), path);
}

std::string datarate_literal(std::int64_t bps) {
    static constexpr struct {
        std::int64_t factor;
        const char* unit;
    } kUnits[] = {{1'000'000'000, "Gbps"}, {1'000'000, "Mbps"}, {1'000, "kbps"}, {1, "bps"}};
    for (const auto& u : kUnits) {
        if (bps % u.factor == 0) return std::to_string(bps / u.factor) + u.unit;
    }
    return std::to_string(bps) + "bps";
}

std::string quote_string(std::string_view s) { return ParamValue(std::string(s)).literal(); }

} // namespace polysim::topo
