#include "doctest.h"

#include "polysim/topology/parser.hpp"

using namespace polysim;
using namespace polysim::topo;

namespace {

const char* kTicToc = R"(
simple Tic { parameters: time delay = 0.1s; gates: input in; output out; }
network TicToc { submodules: tic: Tic; toc: Tic; connections: tic.out --> { delay = 100ms; } --> toc.in; toc.out --> { delay = 100ms; } --> tic.in; }
)";

TopoErrc error_of(std::string_view text) {
    try {
        (void)parse_topology(text);
    } catch (const TopologyError& e) {
        return e.code();
    }
    FAIL("expected a TopologyError for: " << text);
    return TopoErrc::SyntaxError;
}

} // namespace

TEST_CASE("TicToc sample parses into one simple type and one network") {
    const auto ast = parse_topology(kTicToc);
    CHECK(ast.count(DeclKind::Simple) == 1);
    CHECK(ast.count(DeclKind::Network) == 1);
    const ModuleDecl* tic = ast.find("Tic");
    REQUIRE(tic != nullptr);
    REQUIRE(tic->parameters.size() == 1);
    CHECK(tic->parameters[0].type == ParamType::Time);
    CHECK(tic->parameters[0].default_value == ParamValue(SimTime::millis(100)));
    REQUIRE(tic->gates.size() == 2);
    CHECK(tic->gates[0].direction == GateDirection::Input);
    CHECK(tic->gates[1].direction == GateDirection::Output);

    const ModuleDecl* net = ast.find("TicToc");
    REQUIRE(net != nullptr);
    CHECK(net->submodules.size() == 2);
    REQUIRE(net->connections.size() == 2);
    const auto& c = net->connections[0];
    CHECK(c.from.str() == "tic.out");
    CHECK(c.to.str() == "toc.in");
    REQUIRE(c.channel.has_value());
    CHECK(c.channel->delay == SimTime::millis(100));
    CHECK_FALSE(c.channel->datarate.has_value());
}

TEST_CASE("duplicate names are rejected at parse time") {
    CHECK(error_of("simple X { gates: input in; input in; }") == TopoErrc::DuplicateName);
    CHECK(error_of("simple X { parameters: int a; double a; }") == TopoErrc::DuplicateName);
    CHECK(error_of("simple X { } simple X { }") == TopoErrc::DuplicateName);
    CHECK(error_of("network N { submodules: a: X; a: Y; }") == TopoErrc::DuplicateName);
    CHECK(error_of("network N { submodules: a: X { p = 1; p = 2; } }") == TopoErrc::DuplicateName);
}

TEST_CASE("direction problems are left to elaboration") {
    const auto ast = parse_topology("network N { submodules: a: X; b: X; connections: a.out --> b.out; }");
    CHECK(ast.find("N")->connections.size() == 1);
}

TEST_CASE("syntax errors carry position and expected tokens") {
    try {
        (void)parse_topology("simple X {\n  gates:\n    input in\n}");
        FAIL("should not parse");
    } catch (const TopologyError& e) {
        CHECK(e.code() == TopoErrc::SyntaxError);
        CHECK(e.pos().line == 4);
        CHECK(e.pos().column == 1);
        REQUIRE_FALSE(e.expected().empty());
        CHECK(std::string(e.what()).find("';'") != std::string::npos);
    }
    try {
        (void)parse_topology("widget X { }");
        FAIL("should not parse");
    } catch (const TopologyError& e) {
        CHECK(e.pos().line == 1);
        CHECK(e.expected().size() == 3);
    }
}

TEST_CASE("literals and units") {
    const auto ast = parse_topology(R"(
        simple S {
            parameters:
                int i = -42;
                double d = 2.5e-3;
                string s = "a \"q\" b";
                bool b = false;
                time t = 1.5us;
            gates:
                input in[3] @required;
        }
        network N {
            submodules:
                x[2]: S { i = 7; }
                y: <kind> like S;
            connections:
                x[0].out --> { datarate = 1.5Mbps; delay = 0s; } --> x[1].in[2];
                in --> x[1].in;
        }
    )");
    const auto& s = *ast.find("S");
    CHECK(s.parameters[0].default_value == ParamValue(std::int64_t{-42}));
    CHECK(s.parameters[1].default_value == ParamValue(2.5e-3));
    CHECK(s.parameters[2].default_value == ParamValue(std::string("a \"q\" b")));
    CHECK(s.parameters[3].default_value == ParamValue(false));
    CHECK(s.parameters[4].default_value == ParamValue(SimTime::from_ticks(1'500'000)));
    CHECK(s.gates[0].vector_size == 3);
    CHECK(s.gates[0].required);

    const auto& n = *ast.find("N");
    CHECK(n.submodules[0].vector_size == 2);
    CHECK(n.submodules[0].assignments[0].value == ParamValue(std::int64_t{7}));
    CHECK(n.submodules[1].type_from_param);
    CHECK(n.submodules[1].type == "kind");
    CHECK(n.submodules[1].like == "S");
    CHECK(n.connections[0].channel->datarate == 1'500'000);
    CHECK(n.connections[0].channel->delay == SimTime());
    CHECK(n.connections[0].to.gate_index == 2);
    CHECK(n.connections[1].from.submodule.empty());
    CHECK_FALSE(n.connections[1].channel.has_value());
}

TEST_CASE("unit errors") {
    CHECK(error_of("simple S { parameters: time t = 5parsecs; }") == TopoErrc::UnknownUnit);
    CHECK(error_of("network N { connections: a.o --> { delay = 5; } --> b.i; }") == TopoErrc::UnknownUnit);
    CHECK(error_of("network N { connections: a.o --> { datarate = 10; } --> b.i; }") == TopoErrc::UnknownUnit);
    CHECK(error_of("network N { connections: a.o --> { datarate = 0.5bps; } --> b.i; }") == TopoErrc::SyntaxError);
    CHECK(error_of("simple S { parameters: time t = 0.0000000000001s; }") == TopoErrc::SyntaxError);
}

TEST_CASE("@class and guest implementations") {
    const auto ast = parse_topology(R"(simple EchoImpl { @class("guest:echo.EchoServerGuest"); gates: input in; })");
    CHECK(ast.decls[0].implementation == "guest:echo.EchoServerGuest");
    CHECK(error_of(R"(module M { @class("x"); })") == TopoErrc::SyntaxError);
    CHECK(error_of("simple S { submodules: a: B; }") == TopoErrc::SyntaxError);
}

TEST_CASE("comments and reserved words") {
    const auto ast = parse_topology("// header\nsimple S { // trailing\n gates: input in; }\n");
    CHECK(ast.decls.size() == 1);
    CHECK(error_of("simple gates { }") == TopoErrc::SyntaxError);
    CHECK(error_of("simple S { gates: input \"x\"; }") == TopoErrc::SyntaxError);
    CHECK(error_of("simple S { parameters: string s = \"open; }") == TopoErrc::SyntaxError);
}

TEST_CASE("parse_literal") {
    CHECK(parse_literal("100ms") == ParamValue(SimTime::millis(100)));
    CHECK(parse_literal("\"x\"") == ParamValue(std::string("x")));
    CHECK(parse_literal("true") == ParamValue(true));
    CHECK(parse_literal("3") == ParamValue(std::int64_t{3}));
    CHECK_THROWS_AS((void)parse_literal("3 4"), TopologyError);
}

TEST_CASE("datarate literal printing picks the largest exact unit") {
    CHECK(datarate_literal(10'000'000) == "10Mbps");
    CHECK(datarate_literal(1'500'000) == "1500kbps");
    CHECK(datarate_literal(7) == "7bps");
    CHECK(datarate_literal(2'000'000'000) == "2Gbps");
}
