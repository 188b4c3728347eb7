#include "doctest.h"

#include "support/world.hpp"

#include "polysim/bindgen/bindgen.hpp"
#include "polysim/bridge/bridge.hpp"
#include "polysim/bridge/inprocess.hpp"
#include "polysim/kernel/errors.hpp"
#include "polysim/runner/session.hpp"
#include "polysim/stdmodels/models.hpp"
#include "polysim/topology/elaborate.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace polysim;
using namespace polysim::bridge;
using abi::Handle;
using abi::Value;
using testworld::guest_ini;
using testworld::kGuestDir;

namespace {

constexpr std::int64_t kScalarGate = -1;

const char* kTestLibrary = R"(
simple Keeper {
    @class("guest:test.Keeper");
    parameters:
        time delay = 100ms;
    gates:
        input in;
        output out;
}
simple Thrower {
    @class("guest:test.Thrower");
    gates:
        input in;
        output out;
}
simple Ghost {
    @class("guest:test.NoSuchClass");
    gates:
        input in;
        output out;
}
simple CtorFails {
    @class("guest:test.CtorFails");
    gates:
        input in;
        output out;
}
simple NeverBinds {
    @class("guest:test.NeverBinds");
    gates:
        input in;
        output out;
}
simple Sink {
    gates:
        input in;
        output out;
}
simple Fan {
    gates:
        input in[6];
        output out[6];
}
)";

std::vector<std::string>& sink_arrivals() {
    static std::vector<std::string> names;
    return names;
}

class Sink : public SimpleModule {
public:
    void handle_message(MessagePtr msg) override {
        sink_arrivals().push_back(msg->name() + "/" + std::to_string(msg->kind()));
    }
};

// Holds a message it created across events, then sends it when its timer fires.
class Keeper : public InProcessGuest {
public:
    using InProcessGuest::InProcessGuest;

    void initialize() override {
        kept_ = call_as<Handle>("Message.create", {host_handle(), std::string("kept"), std::int64_t{9}});
        const auto timer = call_as<Handle>("Message.create", {host_handle(), std::string("wake"), std::int64_t{3}});
        const SimTime delay = call_as<SimTime>("get_parameter_time", {host_handle(), std::string("delay")});
        call("schedule_at", {host_handle(), delay, timer, std::int64_t{0}});
    }
    void handle_message(Handle msg) override {
        if (call_as<bool>("Message.is_self_message", {msg})) {
            call("send", {host_handle(), kept_, std::string("out"), kScalarGate, std::int64_t{0}});
        }
        call("Message.destroy", {msg});
    }

private:
    Handle kept_;
};

class Thrower : public InProcessGuest {
public:
    using InProcessGuest::InProcessGuest;
    void handle_message(Handle) override { throw std::runtime_error("bad input"); }
};

class CtorFails : public InProcessGuest {
public:
    explicit CtorFails(InProcessRuntime& rt) : InProcessGuest(rt) { throw std::runtime_error("no resources"); }
    void handle_message(Handle) override {}
};

class NeverBinds : public InProcessGuest {
public:
    explicit NeverBinds(InProcessRuntime& rt) : InProcessGuest(rt, DeferBind{}) {}
    void handle_message(Handle) override {}
};

template <class T>
InProcessFactory make() {
    return [](InProcessRuntime& rt) { return std::make_unique<T>(rt); };
}

void add_test_classes(InProcessRuntime& rt) {
    rt.register_class("test.Keeper", make<Keeper>());
    rt.register_class("test.Thrower", make<Thrower>());
    rt.register_class("test.CtorFails", make<CtorFails>());
    rt.register_class("test.NeverBinds", make<NeverBinds>());
}

topo::ModuleTypeRegistry test_registry() {
    topo::ModuleTypeRegistry r = runner::standard_registry();
    r.add_library(topo::parse_topology(kTestLibrary, "<bridge-test>"));
    r.add_native("Sink", [] { return std::make_unique<Sink>(); });
    r.add_native("Fan", [] { return std::make_unique<Sink>(); });
    return r;
}

runner::RuntimeFactory test_factory() { return testworld::inprocess_with(add_test_classes); }

// Elaborates without constructing guests, so tests can drive the bridge by hand.
struct Manual {
    topo::ModuleTypeRegistry registry = test_registry();
    topo::ElaboratedNetwork elaborated;
    std::vector<topo::GuestRequest> requests;
    std::unique_ptr<Simulation> sim;
    std::unique_ptr<GuestBridge> bridge;
    InProcessRuntime* runtime = nullptr;

    Manual(const std::string& topology, RuntimeConfig cfg = RuntimeConfig{"", {kGuestDir}, true}) {
        elaborated = topo::elaborate(topo::parse_topology(topology), testworld::settings_from(
                                                                         "network = Net\n"),
                                     registry);
        requests = elaborated.guest_requests;
        sim = std::make_unique<Simulation>(std::move(elaborated.network));
        auto rt = std::make_unique<InProcessRuntime>();
        add_test_classes(*rt);
        runtime = rt.get();
        bridge = std::make_unique<GuestBridge>(*sim, std::move(rt), std::move(cfg));
    }
    ~Manual() { bridge.reset(); }

    Module& module(const std::string& path) { return *sim->network().find(path); }
    PeerPair create(std::size_t i) {
        return bridge->create_guest_module(sim->network().module(requests[i].module), requests[i].class_name);
    }
};

const char* kKeeperNet = R"(
network Net {
    submodules:
        keeper: Keeper;
        sink: Sink;
    connections:
        keeper.out --> { delay = 10ms; } --> sink.in;
        sink.out --> keeper.in;
}
)";

BridgeErrc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const BridgeError& e) {
        return e.code();
    }
    FAIL("expected a BridgeError");
    return BridgeErrc::InvalidState;
}

abi::RegistrationTable kernel_table_from_manifest() {
    return bindgen::generate(bindgen::load_manifest_file(std::string(POLYSIM_SOURCE_DIR) + "/api/kernel.manifest"))
        .table;
}

std::filesystem::path sdk_copy_with(const std::string& name, const abi::RegistrationTable& table) {
    const auto dir = std::filesystem::path(TEST_TMP_DIR) / "sdk" / name;
    testworld::write_file(dir / "polysim" / "registration.tsv", abi::format_table(table));
    return dir;
}

} // namespace

TEST_CASE("the guest runtime starts lazily and only once") {
    SUBCASE("a network without guest modules never creates a bridge") {
        runner::Session s(topo::parse_topology("network Net { submodules: a: Sink; b: Sink; connections: a.out --> b.in; b.out --> a.in; }"),
                          testworld::settings_from(guest_ini("Net")), test_registry(), {nullptr, nullptr, test_factory()});
        CHECK(s.bridge() == nullptr);
        CHECK(s.guest_status() == RuntimeStatus::NotStarted);
        s.run();
        CHECK(s.guest_status() == RuntimeStatus::NotStarted);
    }
    SUBCASE("start happens at the first guest module and is idempotent") {
        Manual m(kKeeperNet);
        CHECK(m.bridge->status() == RuntimeStatus::NotStarted);
        CHECK_FALSE(m.runtime->started());
        m.bridge->init_guest_runtime();
        CHECK(m.bridge->status() == RuntimeStatus::Ready);
        CHECK(m.runtime->started());
        const auto issued = m.bridge->handles().issued();
        m.bridge->init_guest_runtime();
        CHECK(m.bridge->handles().issued() == issued);
        CHECK(m.bridge->verification().checked == kernel_exports().size());
        CHECK(m.runtime->table_path() == kGuestDir + "/polysim/registration.tsv");
    }
}

TEST_CASE("a missing guest SDK fails startup and the failure sticks") {
    Manual m(kKeeperNet, RuntimeConfig{"", {"/nonexistent/guest/dir"}, true});
    std::string first;
    try {
        m.create(0);
        FAIL("expected startup failure");
    } catch (const BridgeError& e) {
        CHECK(e.code() == BridgeErrc::RuntimeStartFailure);
        CHECK(e.detail().find("/nonexistent/guest/dir") != std::string::npos);
        first = e.what();
    }
    CHECK(m.bridge->status() == RuntimeStatus::Failed);
    CHECK_FALSE(m.runtime->started());
    try {
        m.bridge->init_guest_runtime();
        FAIL("expected the stored failure");
    } catch (const BridgeError& e) {
        CHECK(e.code() == BridgeErrc::RuntimeStartFailure);
        CHECK(std::string(e.what()) == first);
    }
}

TEST_CASE("the runtime path must exist") {
    Manual m(kKeeperNet, RuntimeConfig{"/no/such/runtime", {kGuestDir}, true});
    CHECK(code_of([&] { m.bridge->init_guest_runtime(); }) == BridgeErrc::RuntimeStartFailure);
}

TEST_CASE("the generated registration table matches the kernel exports exactly") {
    const abi::RegistrationTable generated = kernel_table_from_manifest();
    const VerificationReport report = verify_registrations(generated, kernel_exports());
    CHECK_MESSAGE(report.ok(), report.str());
    CHECK(report.checked == kernel_exports().size());
    CHECK(generated.entries.size() == kernel_exports().size());
    CHECK(abi::load_table_file(kGuestDir + "/polysim/registration.tsv") == generated);
    // same entries; the host lists them by name, the generator by class
    auto by_name = [](abi::RegistrationTable t) {
        std::sort(t.entries.begin(), t.entries.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        return t;
    };
    CHECK(by_name(kernel_exports().table()) == by_name(generated));
}

TEST_CASE("verification lists every disagreement") {
    abi::RegistrationTable table = kernel_table_from_manifest();
    auto entry = [&](const std::string& name) -> abi::RegistrationEntry& {
        auto it = std::find_if(table.entries.begin(), table.entries.end(),
                               [&](const auto& e) { return e.name == name; });
        REQUIRE(it != table.entries.end());
        return *it;
    };
    entry("now").signature.returns = abi::SigType::Int64;
    entry("send").signature.params[3] = abi::SigType::String;
    table.entries.push_back({"teleport", {{abi::SigType::Handle}, abi::SigType::Void}});
    table.entries.erase(std::find_if(table.entries.begin(), table.entries.end(),
                                     [](const auto& e) { return e.name == "log"; }));

    const VerificationReport report = verify_registrations(table, kernel_exports());
    CHECK_FALSE(report.ok());
    std::set<std::string> names;
    for (const auto& m : report.mismatches) names.insert(m.name);
    CHECK(names == std::set<std::string>{"log", "now", "send", "teleport"});
    for (const auto& m : report.mismatches) {
        if (m.name == "teleport") CHECK(m.host == "unknown export");
        if (m.name == "log") CHECK(m.guest == "missing from guest table");
        if (m.name == "now") {
            CHECK(m.host == "() -> simtime");
            CHECK(m.guest == "() -> int64");
        }
    }

    SUBCASE("startup reports all of them before any guest object exists") {
        const auto dir = sdk_copy_with("four-mismatches", table);
        Manual m(kKeeperNet, RuntimeConfig{"", {dir.string()}, true});
        try {
            m.create(0);
            FAIL("expected RegistrationMismatch");
        } catch (const BridgeError& e) {
            CHECK(e.code() == BridgeErrc::RegistrationMismatch);
            for (const char* n : {"log", "now", "send", "teleport"}) CHECK(e.detail().find(n) != std::string::npos);
        }
        CHECK(m.bridge->status() == RuntimeStatus::Failed);
        CHECK(m.runtime->live_objects() == 0);
        CHECK(m.bridge->peers().empty());
    }
    SUBCASE("guest-sdk-check off skips verification") {
        const auto dir = sdk_copy_with("unchecked", table);
        Manual m(kKeeperNet, RuntimeConfig{"", {dir.string()}, false});
        CHECK_NOTHROW(m.create(0));
        CHECK(m.bridge->verification().checked == 0);
    }
    SUBCASE("a malformed table is a registration mismatch") {
        const auto dir = std::filesystem::path(TEST_TMP_DIR) / "sdk" / "malformed";
        testworld::write_file(dir / "polysim" / "registration.tsv", "now\tsimtime\n");
        Manual m(kKeeperNet, RuntimeConfig{"", {dir.string()}, true});
        CHECK(code_of([&] { m.create(0); }) == BridgeErrc::RegistrationMismatch);
    }
}

TEST_CASE("peer handles form a bijection") {
    std::string topology = R"(
network Net {
    submodules:
        k[6]: Keeper;
        s: Sink;
        fan: Fan;
    connections:
)";
    for (int i = 0; i < 6; ++i) {
        topology += "        k[" + std::to_string(i) + "].out --> fan.in[" + std::to_string(i) + "];\n";
        topology += "        fan.out[" + std::to_string(i) + "] --> k[" + std::to_string(i) + "].in;\n";
    }
    topology += "        s.out --> s.in;\n}\n";

    std::mt19937_64 rng(0xB1D1);
    for (int round = 0; round < 40; ++round) {
        CAPTURE(round);
        Manual m(topology);
        std::vector<std::size_t> order(m.requests.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);

        std::set<std::uint64_t> hosts, guests;
        for (std::size_t i : order) {
            const PeerPair p = m.create(i);
            CHECK(&m.bridge->module_of(p.host) == &m.sim->network().module(m.requests[i].module));
            CHECK(hosts.insert(p.host.value).second);
            CHECK(guests.insert(p.guest.value).second);
        }
        CHECK(m.bridge->peers().size() == order.size());
        std::set<std::uint64_t> all = hosts;
        all.insert(guests.begin(), guests.end());
        CHECK(all.size() == hosts.size() + guests.size());
        for (const PeerPair& p : m.bridge->peers()) {
            CHECK(m.bridge->guest_for(p.host) == p.guest);
            CHECK(m.bridge->host_for(p.guest) == p.host);
        }
        CHECK(m.runtime->live_objects() == order.size());
        CHECK(m.bridge->handles().live_count() == 2 * order.size());
    }
}

TEST_CASE("guest construction failures") {
    SUBCASE("an unknown class names the module path searched") {
        Manual m("network Net { submodules: g: Ghost; s: Sink; connections: g.out --> s.in; s.out --> g.in; }");
        try {
            m.create(0);
            FAIL("expected UnknownGuestClass");
        } catch (const BridgeError& e) {
            CHECK(e.code() == BridgeErrc::UnknownGuestClass);
            CHECK(e.detail().find("test.NoSuchClass") != std::string::npos);
            CHECK(e.detail().find(kGuestDir) != std::string::npos);
        }
    }
    SUBCASE("a throwing constructor leaves no handles behind") {
        Manual m("network Net { submodules: g: CtorFails; s: Sink; connections: g.out --> s.in; s.out --> g.in; }");
        m.bridge->init_guest_runtime();
        try {
            m.create(0);
            FAIL("expected GuestConstructorFailure");
        } catch (const BridgeError& e) {
            CHECK(e.code() == BridgeErrc::GuestConstructorFailure);
            CHECK(e.detail().find("no resources") != std::string::npos);
        }
        CHECK(m.bridge->handles().live_count() == 0);
        CHECK(m.bridge->peers().empty());
        CHECK(m.runtime->live_objects() == 0);
    }
    SUBCASE("a constructor that skips the base binding is rejected") {
        Manual m("network Net { submodules: g: NeverBinds; s: Sink; connections: g.out --> s.in; s.out --> g.in; }");
        CHECK(code_of([&] { m.create(0); }) == BridgeErrc::GuestConstructorFailure);
        CHECK(m.bridge->handles().live_count() == 0);
        CHECK(m.runtime->live_objects() == 0);
    }
    SUBCASE("sessions surface the same errors before the first event") {
        const auto reg = test_registry();
        for (const char* type : {"Ghost", "CtorFails", "NeverBinds"}) {
            CAPTURE(type);
            const std::string net = std::string("network Net { submodules: g: ") + type +
                                    "; s: Sink; connections: g.out --> s.in; s.out --> g.in; }";
            CHECK_THROWS_AS(runner::Session(topo::parse_topology(net), testworld::settings_from(guest_ini("Net")), reg,
                                            {nullptr, nullptr, test_factory()}),
                            BridgeError);
        }
    }
}

TEST_CASE("a guest can hold a message across events") {
    sink_arrivals().clear();
    Manual m(kKeeperNet);
    m.create(0);
    m.sim->validate();
    m.sim->initialize();

    const auto clean = [&] {
        CHECK(m.bridge->audit().empty());
        CHECK(m.sim->audit_ownership().empty());
    };
    clean();
    REQUIRE(m.bridge->guest_held_count() == 1);
    const Message* kept = nullptr;
    for (const Message* msg : m.sim->messages().live_messages()) {
        if (msg->name() == "kept") kept = msg;
    }
    REQUIRE(kept != nullptr);
    CHECK(kept->owner() == Owner::guest());
    const MessageId kept_id = kept->id();
    const Handle kept_handle = m.bridge->message_handle(kept_id);

    // the timer fires, the guest sends the kept message onward
    auto out = m.sim->step();
    CHECK_FALSE(out.exhausted);
    CHECK(m.sim->now() == SimTime::millis(100));
    clean();
    CHECK(m.bridge->guest_held_count() == 0);
    CHECK(m.bridge->message_handle(kept_id) == kept_handle);

    out = m.sim->step();
    CHECK(m.sim->now() == SimTime::millis(110));
    clean();
    CHECK(sink_arrivals() == std::vector<std::string>{"kept/9"});
    CHECK(m.sim->step().exhausted);

    // the sink destroyed the message, so its one handle is gone for good
    CHECK(code_of([&] { (void)m.bridge->held_message(kept_handle); }) == BridgeErrc::StaleHandle);
    CHECK(m.sim->messages().live_count() == 0);
}

TEST_CASE("a guest exception aborts the run with the class and callback named") {
    const char* net = R"(
network Net {
    submodules:
        keeper: Keeper;
        thrower: Thrower;
    connections:
        keeper.out --> thrower.in;
        thrower.out --> keeper.in;
}
)";
    runner::Session s(topo::parse_topology(net), testworld::settings_from(guest_ini("Net")), test_registry(),
                      {nullptr, nullptr, test_factory()});
    const RunReport r = s.run();
    CHECK(r.stop_reason == StopReason::Error);
    REQUIRE(r.error_detail);
    CHECK(r.error_detail->find("test.Thrower.handle_message(): bad input") != std::string::npos);
    CHECK(r.final_time == SimTime::millis(100));
    CHECK(s.guest_status() == RuntimeStatus::TornDown);
    CHECK(s.sim().audit_ownership().empty());
}

TEST_CASE("exports check names, arity and types") {
    Manual m(kKeeperNet);
    const PeerPair p = m.create(0);
    GuestBridge& b = *m.bridge;
    auto call = [&](std::string_view name, std::vector<Value> args) { return b.call_export(name, args); };

    CHECK(code_of([&] { call("teleport", {p.host}); }) == BridgeErrc::UnknownExport);
    CHECK(code_of([&] { call("now", {std::int64_t{1}}); }) == BridgeErrc::ArgumentType);
    CHECK(code_of([&] { call("get_parameter_int", {p.host, std::int64_t{5}}); }) == BridgeErrc::ArgumentType);
    CHECK(code_of([&] { call("Message.name", {p.host}); }) == BridgeErrc::ArgumentType);
    CHECK(code_of([&] { call("module_path", {p.guest}); }) == BridgeErrc::ArgumentType);
    CHECK(code_of([&] { call("module_path", {Handle{999}}); }) == BridgeErrc::StaleHandle);

    CHECK(std::get<SimTime>(call("get_parameter_time", {p.host, std::string("delay")})) == SimTime::millis(100));
    CHECK(std::get<std::string>(call("module_path", {p.host})) == "Net.keeper");
    CHECK(std::get<bool>(call("gate_connected", {p.host, std::string("out"), kScalarGate})));
    CHECK(std::get<bool>(call("SimTime.lessThan", {SimTime::millis(1), SimTime::millis(2)})));
    CHECK(std::get<SimTime>(call("SimTime.plus", {SimTime::millis(1), SimTime::millis(2)})) == SimTime::millis(3));

    SUBCASE("a destroyed message's handle goes stale") {
        const auto h = std::get<Handle>(call("Message.create", {p.host, std::string("tmp"), std::int64_t{0}}));
        CHECK(std::get<std::string>(call("Message.name", {h})) == "tmp");
        call("Message.destroy", {h});
        CHECK(code_of([&] { call("Message.name", {h}); }) == BridgeErrc::StaleHandle);
        CHECK(code_of([&] { call("Message.destroy", {h}); }) == BridgeErrc::StaleHandle);
    }
    SUBCASE("a rejected send leaves the message with the guest") {
        const auto h = std::get<Handle>(call("Message.create", {p.host, std::string("tmp"), std::int64_t{0}}));
        CHECK_THROWS(call("send", {p.host, h, std::string("nosuchgate"), kScalarGate, std::int64_t{0}}));
        CHECK_THROWS(call("send", {p.host, h, std::string("in"), kScalarGate, std::int64_t{0}}));
        CHECK(std::get<std::string>(call("Message.name", {h})) == "tmp");
        CHECK(b.guest_held_count() == 1);
        CHECK(b.audit().empty());
    }
    SUBCASE("teardown invalidates every handle") {
        const auto h = std::get<Handle>(call("Message.create", {p.host, std::string("tmp"), std::int64_t{0}}));
        b.teardown();
        CHECK(b.status() == RuntimeStatus::TornDown);
        CHECK(code_of([&] { call("module_path", {p.host}); }) == BridgeErrc::StaleHandle);
        CHECK(code_of([&] { call("Message.name", {h}); }) == BridgeErrc::StaleHandle);
        CHECK(code_of([&] { (void)b.guest_for(p.host); }) == BridgeErrc::StaleHandle);
        CHECK(b.handles().live_count() == 0);
        CHECK(m.runtime->live_objects() == 0);
        CHECK(m.sim->messages().live_count() == 0);
        CHECK(code_of([&] { b.init_guest_runtime(); }) == BridgeErrc::InvalidState);
        b.teardown();
    }
}

TEST_CASE("handle values are never reused") {
    HandleRegistry reg;
    std::set<std::uint64_t> seen;
    std::mt19937_64 rng(7);
    std::vector<Handle> live;
    for (int i = 0; i < 2000; ++i) {
        if (live.empty() || rng() % 3 != 0) {
            const Handle h = reg.allocate(HandleKind::Message, static_cast<std::uint64_t>(i));
            CHECK(seen.insert(h.value).second);
            live.push_back(h);
        } else {
            const std::size_t k = rng() % live.size();
            reg.release(live[k]);
            CHECK_FALSE(reg.live(live[k]));
            CHECK(code_of([&] { (void)reg.resolve(live[k], HandleKind::Message); }) == BridgeErrc::StaleHandle);
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    CHECK(reg.live_count() == live.size());
    CHECK(reg.issued() == seen.size());
    CHECK(code_of([&] { (void)reg.resolve(Handle{0}, HandleKind::Message); }) == BridgeErrc::StaleHandle);
    if (!live.empty()) {
        CHECK(code_of([&] { (void)reg.resolve(live.front(), HandleKind::HostModule); }) == BridgeErrc::ArgumentType);
    }
}
