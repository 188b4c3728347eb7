#include "polysim/topology/parser.hpp"

namespace polysim::topo {

namespace {

std::string index_suffix(const std::optional<int>& i) { return i ? "[" + std::to_string(*i) + "]" : ""; }

class Printer {
public:
    explicit Printer(const PrintStyle& style) : style_(style) {}

    std::string run(const TopologyAst& ast) {
        for (std::size_t i = 0; i < ast.decls.size(); ++i) {
            if (i > 0 && !style_.compact) out_ += "\n";
            decl(ast.decls[i]);
        }
        return out_;
    }

private:
    void line(int depth, const std::string& text) {
        if (style_.compact) {
            if (!out_.empty() && out_.back() != '\n') out_ += " ";
            out_ += text;
            return;
        }
        out_.append(static_cast<std::size_t>(depth * style_.indent), ' ');
        out_ += text;
        out_ += "\n";
    }

    void decl(const ModuleDecl& d) {
        line(0, std::string(keyword(d.kind)) + " " + d.name + " {");
        if (!d.implementation.empty()) line(1, "@class(" + quote_string(d.implementation) + ");");
        if (!d.parameters.empty()) {
            line(1, "parameters:");
            for (const auto& p : d.parameters) {
                std::string s = std::string(to_string(p.type)) + " " + p.name;
                if (p.default_value) s += " = " + p.default_value->literal();
                line(2, s + ";");
            }
        }
        if (!d.gates.empty()) {
            line(1, "gates:");
            for (const auto& g : d.gates) {
                std::string s = std::string(to_string(g.direction)) + " " + g.name + index_suffix(g.vector_size);
                if (g.required) s += " @required";
                line(2, s + ";");
            }
        }
        if (!d.submodules.empty()) {
            line(1, "submodules:");
            for (const auto& s : d.submodules) {
                std::string text = s.name + index_suffix(s.vector_size) + ": ";
                text += s.type_from_param ? "<" + s.type + ">" : s.type;
                if (s.like) text += " like " + *s.like;
                if (s.assignments.empty()) {
                    text += ";";
                } else {
                    text += " {";
                    for (const auto& a : s.assignments) text += " " + a.name + " = " + a.value.literal() + ";";
                    text += " }";
                }
                line(2, text);
            }
        }
        if (!d.connections.empty()) {
            line(1, "connections:");
            for (const auto& c : d.connections) {
                std::string text = c.from.str() + " -->";
                if (c.channel) {
                    text += " {";
                    if (c.channel->delay) text += " delay = " + c.channel->delay->str_with_unit() + ";";
                    if (c.channel->datarate) text += " datarate = " + datarate_literal(*c.channel->datarate) + ";";
                    text += " } -->";
                }
                line(2, text + " " + c.to.str() + ";");
            }
        }
        line(0, "}");
        if (style_.compact) out_ += "\n";
    }

    const PrintStyle& style_;
    std::string out_;
};

} // namespace

std::string print_topology(const TopologyAst& ast, const PrintStyle& style) { return Printer(style).run(ast); }

} // namespace polysim::topo
