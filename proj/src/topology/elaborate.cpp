#include "polysim/topology/elaborate.hpp"

#include "polysim/topology/parser.hpp"

#include <algorithm>

namespace polysim::topo {

void ModuleTypeRegistry::add_library(TopologyAst ast) { library_.merge(std::move(ast)); }

void ModuleTypeRegistry::add_native(std::string implementation, NativeFactory factory) {
    natives_[std::move(implementation)] = std::move(factory);
}

void ModuleTypeRegistry::add_guest(std::string type_name, std::string class_name) {
    guests_[std::move(type_name)] = std::move(class_name);
}

const NativeFactory* ModuleTypeRegistry::find_native(std::string_view implementation) const noexcept {
    auto it = natives_.find(implementation);
    return it == natives_.end() ? nullptr : &it->second;
}

const std::string* ModuleTypeRegistry::guest_class(std::string_view type_name) const noexcept {
    auto it = guests_.find(type_name);
    return it == guests_.end() ? nullptr : &it->second;
}

namespace {

std::optional<ParamValue> coerce(const ParamValue& v, ParamType want) {
    if (v.type() == want) return v;
    if (want == ParamType::Double && v.type() == ParamType::Int) return ParamValue(v.as_double());
    return std::nullopt;
}

} // namespace

ParamValue convert_config_value(std::string_view text, ParamType type) {
    if (type == ParamType::String && (text.empty() || text.front() != '"')) return ParamValue(std::string(text));
    ParamValue v;
    try {
        v = parse_literal(text);
    } catch (const TopologyError& e) {
        if (e.code() == TopoErrc::UnknownUnit) throw;
        throw TopologyError(TopoErrc::ParameterType,
                            "'" + std::string(text) + "' is not a valid " + to_string(type) + " value");
    }
    if (type == ParamType::Time && (v.type() == ParamType::Int || v.type() == ParamType::Double)) {
        throw TopologyError(TopoErrc::UnknownUnit, "time value '" + std::string(text) +
                                                       "' needs a unit (s, ms, us, ns, ps)");
    }
    auto c = coerce(v, type);
    if (!c) {
        throw TopologyError(TopoErrc::ParameterType, "'" + std::string(text) + "' is a " + to_string(v.type()) +
                                                         " value, expected " + to_string(type));
    }
    return *c;
}

namespace {

class Elaborator {
public:
    Elaborator(const TopologyAst& ast, const RunSettings& settings, const ModuleTypeRegistry& registry)
        : ast_(ast), settings_(settings), registry_(registry) {}

    ElaboratedNetwork run() {
        if (!settings_.network) {
            throw TopologyError(TopoErrc::UnknownNetwork, "configuration does not name a network");
        }
        const ModuleDecl* decl = lookup(*settings_.network);
        if (decl == nullptr || decl->kind != DeclKind::Network) {
            throw TopologyError(TopoErrc::UnknownNetwork, "no network named '" + *settings_.network + "'");
        }
        instantiate(*decl, decl->name, nullptr, nullptr);
        check_required();
        return std::move(out_);
    }

private:
    const ModuleDecl* lookup(std::string_view name) const {
        if (const auto* d = ast_.find(name)) return d;
        return registry_.find_decl(name);
    }

    [[noreturn]] static void fail(TopoErrc code, const std::string& msg, SourcePos pos = {}) {
        throw TopologyError(code, msg, {}, pos);
    }

    void assign_parameters(Module& m, const ModuleDecl& decl, const SubmoduleDecl* sub) {
        if (sub != nullptr) {
            for (const auto& a : sub->assignments) {
                if (decl.find_param(a.name) == nullptr) {
                    fail(TopoErrc::UnknownParameter,
                         "module " + m.path() + " (" + decl.name + ") has no parameter '" + a.name + "'", a.pos);
                }
            }
        }
        for (const auto& p : decl.parameters) {
            const std::string full = m.path() + "." + p.name;
            if (const auto* a = settings_.lookup(full)) {
                try {
                    m.set_par(p.name, convert_config_value(a->value, p.type));
                } catch (const TopologyError& e) {
                    throw TopologyError(e.code(),
                                        "parameter " + full + " from '" + a->pattern + "': " + e.message(), {}, a->pos);
                }
                continue;
            }
            const ParamValue* given = nullptr;
            SourcePos where = p.pos;
            if (sub != nullptr) {
                for (const auto& a : sub->assignments) {
                    if (a.name == p.name) {
                        given = &a.value;
                        where = a.pos;
                    }
                }
            }
            if (given == nullptr && p.default_value) given = &*p.default_value;
            if (given == nullptr) {
                fail(TopoErrc::UnassignedParameter, "parameter " + full + " has no value", p.pos);
            }
            auto v = coerce(*given, p.type);
            if (!v) {
                fail(TopoErrc::ParameterType,
                     "parameter " + full + " is declared " + to_string(p.type) + " but given " + given->literal(),
                     where);
            }
            m.set_par(p.name, std::move(*v));
        }
    }

    void instantiate(const ModuleDecl& decl, std::string name, Module* parent, const SubmoduleDecl* sub) {
        if (std::find(stack_.begin(), stack_.end(), decl.name) != stack_.end()) {
            fail(TopoErrc::RecursiveType, "module type '" + decl.name + "' contains itself", decl.pos);
        }
        Module& m = out_.network.add_module(std::move(name), decl.name, parent, decl.is_simple());
        assign_parameters(m, decl, sub);
        for (const auto& g : decl.gates) {
            if (g.vector_size) {
                for (int i = 0; i < *g.vector_size; ++i) m.add_gate(g.name, i, g.direction, g.required);
            } else {
                m.add_gate(g.name, -1, g.direction, g.required);
            }
        }
        if (decl.is_simple()) {
            bind_implementation(m, decl);
            return;
        }
        stack_.push_back(decl.name);
        for (const auto& s : decl.submodules) {
            const ModuleDecl& type = submodule_type(m, s);
            if (s.vector_size) {
                for (int i = 0; i < *s.vector_size; ++i) {
                    instantiate(type, s.name + "[" + std::to_string(i) + "]", &m, &s);
                }
            } else {
                instantiate(type, s.name, &m, &s);
            }
        }
        stack_.pop_back();
        for (const auto& c : decl.connections) connect(m, decl, c);
    }

    void bind_implementation(Module& m, const ModuleDecl& decl) {
        std::string guest;
        if (const auto* g = registry_.guest_class(decl.name)) {
            guest = *g;
        } else if (decl.implementation_name().rfind(kGuestPrefix, 0) == 0) {
            guest = decl.implementation_name().substr(kGuestPrefix.size());
        }
        if (!guest.empty()) {
            out_.guest_requests.push_back(GuestRequest{m.id(), m.path(), guest});
            return;
        }
        const auto* factory = registry_.find_native(decl.implementation_name());
        if (factory == nullptr) {
            fail(TopoErrc::UnknownModuleType,
                 "no implementation '" + decl.implementation_name() + "' registered for simple type '" + decl.name +
                     "' (module " + m.path() + ")",
                 decl.pos);
        }
        m.set_behavior((*factory)());
    }

    const ModuleDecl& submodule_type(const Module& m, const SubmoduleDecl& s) {
        std::string type_name = s.type;
        if (s.type_from_param) {
            if (!m.has_par(s.type)) {
                fail(TopoErrc::UnknownParameter,
                     "submodule " + s.name + " takes its type from missing parameter '" + s.type + "'", s.pos);
            }
            const auto& v = m.par(s.type);
            if (v.type() != ParamType::String) {
                fail(TopoErrc::ParameterType, "type parameter " + m.path() + "." + s.type + " must be a string", s.pos);
            }
            type_name = v.as_string();
        }
        const ModuleDecl* type = lookup(type_name);
        if (type == nullptr || type->kind == DeclKind::Network) {
            fail(TopoErrc::UnknownModuleType,
                 "unknown module type '" + type_name + "' for submodule " + m.path() + "." + s.name, s.pos);
        }
        if (s.like) {
            const ModuleDecl* iface = lookup(*s.like);
            if (iface == nullptr) fail(TopoErrc::UnknownModuleType, "unknown interface type '" + *s.like + "'", s.pos);
            for (const auto& g : iface->gates) {
                const GateDecl* have = type->find_gate(g.name);
                if (have == nullptr || have->direction != g.direction || have->vector_size != g.vector_size) {
                    fail(TopoErrc::InterfaceMismatch, "type '" + type->name + "' does not provide gate '" + g.name +
                                                          "' of interface '" + iface->name + "'",
                         s.pos);
                }
            }
        }
        return *type;
    }

    Gate& resolve(Module& m, const ModuleDecl& decl, const Endpoint& e) {
        Module* target = &m;
        if (!e.submodule.empty()) {
            const SubmoduleDecl* s = decl.find_submodule(e.submodule);
            if (s == nullptr) fail(TopoErrc::UnknownGate, "no submodule '" + e.submodule + "' in " + m.path(), e.pos);
            if (s->vector_size.has_value() != e.submodule_index.has_value()) {
                fail(TopoErrc::UnknownGate,
                     s->vector_size ? "submodule vector '" + e.submodule + "' needs an index"
                                    : "submodule '" + e.submodule + "' is not a vector",
                     e.pos);
            }
            std::string child = e.submodule;
            if (e.submodule_index) child += "[" + std::to_string(*e.submodule_index) + "]";
            target = nullptr;
            for (Module* c : m.children()) {
                if (c->name() == child) target = c;
            }
            if (target == nullptr) fail(TopoErrc::UnknownGate, "index out of range in '" + e.str() + "'", e.pos);
        } else if (e.submodule_index) {
            fail(TopoErrc::UnknownGate, "malformed endpoint '" + e.str() + "'", e.pos);
        }
        Gate* g = target->find_gate(e.gate, e.gate_index.value_or(-1));
        if (g == nullptr) {
            fail(TopoErrc::UnknownGate, "no gate '" + e.gate + (e.gate_index ? "[" + std::to_string(*e.gate_index) + "]" : "") +
                                            "' on " + target->path(),
                 e.pos);
        }
        return *g;
    }

    void connect(Module& m, const ModuleDecl& decl, const Connection& c) {
        Gate& from = resolve(m, decl, c.from);
        Gate& to = resolve(m, decl, c.to);
        const bool from_own = c.from.submodule.empty();
        const bool to_own = c.to.submodule.empty();
        const GateDirection from_need = from_own ? GateDirection::Input : GateDirection::Output;
        const GateDirection to_need = to_own ? GateDirection::Output : GateDirection::Input;
        if (from.direction() != from_need || to.direction() != to_need) {
            fail(TopoErrc::GateDirectionMismatch,
                 "cannot connect " + c.from.str() + " (" + to_string(from.direction()) + ") to " + c.to.str() + " (" +
                     to_string(to.direction()) + ") in " + m.path(),
                 c.pos);
        }
        if (from.next() != nullptr) {
            fail(TopoErrc::GateAlreadyConnected, "gate " + c.from.str() + " in " + m.path() + " is already connected",
                 c.pos);
        }
        if (to.previous() != nullptr) {
            fail(TopoErrc::GateAlreadyConnected, "gate " + c.to.str() + " in " + m.path() + " is already connected",
                 c.pos);
        }
        std::optional<Channel> channel;
        if (c.channel) channel = Channel{c.channel->delay.value_or(SimTime()), c.channel->datarate};
        from.connect_to(to, channel);
        ++out_.connection_count;
    }

    void check_required() {
        for (const auto& mod : out_.network.modules()) {
            if (!mod->is_simple()) continue;
            for (Gate& g : mod->gates()) {
                if (!g.required()) continue;
                bool ok = false;
                if (g.direction() == GateDirection::Output) {
                    const Gate* end = g.path_end();
                    ok = end != &g && end->direction() == GateDirection::Input && end->owner().is_simple();
                } else {
                    const Gate* start = &g;
                    while (start->previous() != nullptr) start = start->previous();
                    ok = start != &g && start->direction() == GateDirection::Output && start->owner().is_simple();
                }
                if (!ok) {
                    fail(TopoErrc::UnconnectedGate,
                         "required gate " + mod->path() + "." + g.full_name() + " is not connected");
                }
            }
        }
    }

    const TopologyAst& ast_;
    const RunSettings& settings_;
    const ModuleTypeRegistry& registry_;
    ElaboratedNetwork out_;
    std::vector<std::string> stack_;
};

} // namespace

ElaboratedNetwork elaborate(const TopologyAst& ast, const RunSettings& settings, const ModuleTypeRegistry& registry) {
    return Elaborator(ast, settings, registry).run();
}

ElaboratedNetwork elaborate(const TopologyAst& ast, const Config& config, const ModuleTypeRegistry& registry,
                            std::string_view section) {
    return elaborate(ast, resolve(config, section), registry);
}

} // namespace polysim::topo
