#include "doctest.h"

#include "polysim/kernel/simulation.hpp"
#include "polysim/topology/elaborate.hpp"
#include "polysim/topology/parser.hpp"

using namespace polysim;
using namespace polysim::topo;

namespace {

class Stub : public SimpleModule {
public:
    void handle_message(MessagePtr) override {}
};

ModuleTypeRegistry stub_registry(std::initializer_list<const char*> impls) {
    ModuleTypeRegistry r;
    for (const char* name : impls) r.add_native(name, [] { return std::make_unique<Stub>(); });
    return r;
}

const char* kTicToc = R"(
simple Tic { parameters: time delay = 0.1s; gates: input in; output out; }
network TicToc { submodules: tic: Tic; toc: Tic; connections: tic.out --> { delay = 100ms; } --> toc.in; toc.out --> { delay = 100ms; } --> tic.in; }
)";

TopoErrc error_of(const std::string& topology, const std::string& config, const ModuleTypeRegistry& reg) {
    try {
        (void)elaborate(parse_topology(topology), parse_config(config), reg);
    } catch (const TopologyError& e) {
        return e.code();
    }
    FAIL("expected elaboration to fail");
    return TopoErrc::SyntaxError;
}

} // namespace

TEST_CASE("TicToc elaborates into three modules and two connections") {
    const auto reg = stub_registry({"Tic"});
    auto out = elaborate(parse_topology(kTicToc), parse_config("[General]\nnetwork = TicToc\nsim-time-limit = 1s\n"),
                         reg);
    CHECK(out.network.size() == 3);
    CHECK(out.connection_count == 2);
    CHECK(out.guest_requests.empty());
    Module* tic = out.network.find("TicToc.tic");
    Module* toc = out.network.find("TicToc.toc");
    REQUIRE(tic != nullptr);
    REQUIRE(toc != nullptr);
    CHECK(tic->par("delay").as_time() == SimTime::millis(100));
    CHECK(toc->par("delay").as_time() == SimTime::millis(100));
    CHECK(tic->gate("out").next() == &toc->gate("in"));
    CHECK(tic->gate("out").channel()->delay == SimTime::millis(100));
    CHECK(tic->behavior() != nullptr);
    CHECK(out.network.root()->path() == "TicToc");
}

TEST_CASE("parameter precedence: config pattern, then submodule assignment, then default") {
    const auto reg = stub_registry({"P"});
    const std::string topo = R"(
        simple P { parameters: int a = 1; int b = 1; int c = 1; double d; string s = "x"; }
        network N { submodules: p: P { b = 2; c = 2; d = 3; } q: P { d = 0.5; } }
    )";
    auto out = elaborate(parse_topology(topo), parse_config("network = N\n**.c = 3\nN.q.s = \"y\"\nN.q.s = z\n"), reg);
    Module& p = *out.network.find("N.p");
    Module& q = *out.network.find("N.q");
    CHECK(p.par("a").as_int() == 1);
    CHECK(p.par("b").as_int() == 2);
    CHECK(p.par("c").as_int() == 3);
    CHECK(p.par("d") == ParamValue(3.0));
    CHECK(q.par("d") == ParamValue(0.5));
    CHECK(q.par("s").as_string() == "y");
    CHECK(p.par("s").as_string() == "x");
}

TEST_CASE("elaboration errors") {
    const auto reg = stub_registry({"Tic", "X"});
    SUBCASE("unassigned parameter names module path and parameter") {
        try {
            (void)elaborate(parse_topology("simple X { parameters: int n; } network N { submodules: x: X; }"),
                            parse_config("network = N"), reg);
            FAIL("should fail");
        } catch (const TopologyError& e) {
            CHECK(e.code() == TopoErrc::UnassignedParameter);
            CHECK(e.message().find("N.x.n") != std::string::npos);
        }
    }
    SUBCASE("output to output") {
        CHECK(error_of("simple X { gates: input in; output out; } network N { submodules: a: X; b: X; "
                       "connections: a.out --> b.out; }",
                       "network = N", reg) == TopoErrc::GateDirectionMismatch);
    }
    SUBCASE("unknown module type") {
        CHECK(error_of("network N { submodules: a: Missing; }", "network = N", reg) == TopoErrc::UnknownModuleType);
        CHECK(error_of("simple Y { } network N { submodules: a: Y; }", "network = N", reg) ==
              TopoErrc::UnknownModuleType);
    }
    SUBCASE("unknown or missing network") {
        CHECK(error_of("network N { }", "network = M", reg) == TopoErrc::UnknownNetwork);
        CHECK(error_of("network N { }", "", reg) == TopoErrc::UnknownNetwork);
        CHECK(error_of("module N { }", "network = N", reg) == TopoErrc::UnknownNetwork);
    }
    SUBCASE("required gate left dangling") {
        CHECK(error_of("simple X { gates: input in @required; output out; } network N { submodules: a: X; }",
                       "network = N", reg) == TopoErrc::UnconnectedGate);
        CHECK_NOTHROW(elaborate(parse_topology("simple X { gates: input in @required; output out; } "
                                               "network N { submodules: a: X; b: X; connections: a.out --> b.in; b.out --> a.in; }"),
                                parse_config("network = N"), reg));
    }
    SUBCASE("required gate reaching only a compound boundary") {
        CHECK(error_of("simple X { gates: output out @required; } module H { gates: output o; submodules: x: X; "
                       "connections: x.out --> o; } network N { submodules: h: H; }",
                       "network = N", reg) == TopoErrc::UnconnectedGate);
    }
    SUBCASE("bad gate and submodule references") {
        const std::string x = "simple X { gates: input in; output out; input v[2]; } ";
        CHECK(error_of(x + "network N { submodules: a: X; connections: a.nope --> a.in; }", "network = N", reg) ==
              TopoErrc::UnknownGate);
        CHECK(error_of(x + "network N { submodules: a: X; connections: z.out --> a.in; }", "network = N", reg) ==
              TopoErrc::UnknownGate);
        CHECK(error_of(x + "network N { submodules: a: X; connections: a.out --> a.v[2]; }", "network = N", reg) ==
              TopoErrc::UnknownGate);
        CHECK(error_of(x + "network N { submodules: a[2]: X; connections: a.out --> a[1].in; }", "network = N",
                       reg) == TopoErrc::UnknownGate);
        CHECK(error_of(x + "network N { submodules: a: X; connections: a.out --> a.in; a.out --> a.v[0]; }",
                       "network = N", reg) == TopoErrc::GateAlreadyConnected);
    }
    SUBCASE("parameter typing") {
        CHECK(error_of("simple X { parameters: int n = 1.5; } network N { submodules: x: X; }", "network = N",
                       reg) == TopoErrc::ParameterType);
        CHECK(error_of("simple X { parameters: time t; } network N { submodules: x: X; }", "network = N\n**.t = 5",
                       reg) == TopoErrc::UnknownUnit);
        CHECK(error_of("simple X { parameters: int n; } network N { submodules: x: X; }", "network = N\n**.n = abc",
                       reg) == TopoErrc::ParameterType);
        CHECK(error_of("simple X { parameters: int n = 1; } network N { submodules: x: X { m = 2; } }",
                       "network = N", reg) == TopoErrc::UnknownParameter);
    }
    SUBCASE("recursive compound") {
        CHECK(error_of("module M { submodules: m: M; } network N { submodules: m: M; }", "network = N", reg) ==
              TopoErrc::RecursiveType);
    }
}

TEST_CASE("guest types become instantiation requests") {
    auto reg = stub_registry({"EtherLLC"});
    reg.add_guest("EtherEchoSrv", "echo.EtherEchoSrv");
    const std::string topo = R"(
        simple EtherLLC { gates: input upperIn; output upperOut; }
        simple EtherEchoSrv { gates: input in; output out; }
        simple ByClass { @class("guest:ping.PingGuest"); gates: input in; output out; }
        network Mixed {
            submodules: llc: EtherLLC; srv: EtherEchoSrv; pg: ByClass;
            connections: llc.upperOut --> srv.in; srv.out --> llc.upperIn; pg.out --> pg.in;
        }
    )";
    auto out = elaborate(parse_topology(topo), parse_config("network = Mixed"), reg);
    REQUIRE(out.guest_requests.size() == 2);
    CHECK(out.guest_requests[0].path == "Mixed.srv");
    CHECK(out.guest_requests[0].class_name == "echo.EtherEchoSrv");
    CHECK(out.guest_requests[1].class_name == "ping.PingGuest");
    CHECK(out.network.find("Mixed.srv")->behavior() == nullptr);
    CHECK(out.network.find("Mixed.llc")->behavior() != nullptr);
}

TEST_CASE("module ids follow depth-first declaration order and are deterministic") {
    const auto reg = stub_registry({"L"});
    const std::string topo = R"(
        simple L { gates: input in; output out; }
        module Pair { submodules: x: L; y: L; }
        network N { submodules: first: Pair; nodes[2]: L; last: Pair; }
    )";
    auto ids = [&] {
        auto out = elaborate(parse_topology(topo), parse_config("network = N"), reg);
        std::vector<std::string> paths;
        for (const auto& m : out.network.modules()) paths.push_back(m->path());
        return paths;
    };
    const std::vector<std::string> want = {"N",          "N.first",  "N.first.x", "N.first.y", "N.nodes[0]",
                                           "N.nodes[1]", "N.last",   "N.last.x",  "N.last.y"};
    CHECK(ids() == want);
    CHECK(ids() == ids());
}

TEST_CASE("compound pass-through gates, vectors, datarate channels") {
    const auto reg = stub_registry({"App", "Other"});
    const std::string topo = R"(
        simple App { gates: input in; output out; }
        simple Other { gates: input in; output out; input extra; }
        module Host {
            parameters: string appType = "App";
            gates: input in; output out;
            submodules: app: <appType> like App;
            connections: in --> app.in; app.out --> out;
        }
        network N {
            submodules: h[2]: Host;
            connections:
                h[0].out --> { delay = 1ms; datarate = 10Mbps; } --> h[1].in;
                h[1].out --> h[0].in;
        }
    )";
    auto out = elaborate(parse_topology(topo), parse_config("network = N\nN.h[1].appType = Other\n"), reg);
    CHECK(out.network.find("N.h[1].app")->type_name() == "Other");
    Gate& start = out.network.find("N.h[0].app")->gate("out");
    Gate* end = start.path_end();
    CHECK(end == &out.network.find("N.h[1].app")->gate("in"));

    auto sim_net = std::move(out.network);
    Simulation sim(std::move(sim_net));
    // 1250 bytes: 1 ms serialization + 1 ms delay on the middle hop only
    CHECK(sim.path_duration(start, 1250) == SimTime::millis(2));

    CHECK(error_of(topo, "network = N\nN.h[1].appType = Nothing\n", reg) == TopoErrc::UnknownModuleType);
    const std::string mismatch = std::string(topo) + "simple Bad { gates: output in; output out; }";
    auto reg2 = stub_registry({"App", "Other", "Bad"});
    CHECK(error_of(mismatch, "network = N\n**.appType = Bad\n", reg2) == TopoErrc::InterfaceMismatch);
}

TEST_CASE("library declarations from the registry are visible") {
    auto reg = stub_registry({"Lib"});
    reg.add_library(parse_topology("simple Lib { gates: input in; output out; }"));
    auto out = elaborate(parse_topology("network N { submodules: a: Lib; b: Lib; connections: a.out --> b.in; }"),
                         parse_config("network = N"), reg);
    CHECK(out.network.size() == 3);
    CHECK_THROWS_AS(reg.add_library(parse_topology("simple Lib { }")), TopologyError);
}
