// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any of them failed. Thresholds are fixed here, not taken from
// the command line.

#include "support/world.hpp"

#include "polysim/abi/registration.hpp"
#include "polysim/bindgen/bindgen.hpp"
#include "polysim/kernel/fes.hpp"
#include "polysim/runner/cli.hpp"
#include "polysim/runner/session.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <tuple>

using namespace polysim;
namespace fs = std::filesystem;

namespace {

constexpr int kFesInsertions = 10'000;
constexpr double kFesBudgetSeconds = 5.0;
constexpr std::uint64_t kTicTocEvents = 1000;
constexpr std::int64_t kTicTocStepTicks = SimTime::kTicksPerSecond / 10;
constexpr std::int64_t kPingRttTicks = SimTime::kTicksPerSecond / 100;
constexpr std::uint64_t kOwnershipEvents = 10'000;

struct Verdict {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

// Collects event records with their exact times.
struct RecordingSink final : EventSink {
    std::vector<EventRecord> events;
    void on_event(const EventRecord& r) override { events.push_back(r); }
};

Verdict fes_ordering() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    MessageTracker tracker;
    FutureEventSet fes;
    std::mt19937_64 gen(20240611);
    using Key = std::tuple<std::int64_t, int, std::uint64_t>;
    std::vector<Key> oracle;
    oracle.reserve(kFesInsertions);
    for (int i = 0; i < kFesInsertions; ++i) {
        // narrow ranges so that equal times and equal priorities are common
        const auto t = static_cast<std::int64_t>(gen() % 500);
        const int prio = static_cast<int>(gen() % 7) - 3;
        const auto key = fes.insert(SimTime::from_ticks(t), prio, tracker.create("m", 0, {}, Owner::fes()));
        oracle.emplace_back(t, prio, key.seq);
    }
    std::sort(oracle.begin(), oracle.end());
    std::size_t mismatches = 0, index = 0;
    while (!fes.empty()) {
        const auto e = fes.pop();
        const Key got{e.key.time.ticks(), e.key.priority, e.key.seq};
        if (index >= oracle.size() || got != oracle[index]) ++mismatches;
        ++index;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (index != oracle.size()) v.fail("popped " + std::to_string(index) + " of " + std::to_string(oracle.size()));
    if (mismatches != 0) v.fail(std::to_string(mismatches) + " mismatches");
    if (elapsed >= kFesBudgetSeconds) v.fail("took " + std::to_string(elapsed) + " s");
    if (v.ok) v.detail = "0 mismatches in " + std::to_string(kFesInsertions) + ", " + std::to_string(elapsed) + " s";
    return v;
}

const char* kTicTocNet = R"(
network Net {
    submodules:
        tic: TicToc { starter = true; }
        toc: TicToc;
    connections:
        tic.out --> { delay = 100ms; } --> toc.in;
        toc.out --> { delay = 100ms; } --> tic.in;
}
)";

Verdict tictoc_determinism() {
    Verdict v;
    const std::string ini = "[General]\nnetwork = Net\nevent-limit = " + std::to_string(kTicTocEvents) + "\n";
    const auto reg = runner::standard_registry();
    const auto first = testworld::run_topology(kTicTocNet, ini, reg);
    const auto second = testworld::run_topology(kTicTocNet, ini, reg);
    if (first.log != second.log) v.fail("event logs differ");
    if (testworld::event_lines(first.log) != static_cast<int>(kTicTocEvents))
        v.fail("expected " + std::to_string(kTicTocEvents) + " events");

    RecordingSink sink;
    runner::SessionOptions opts;
    opts.event_sink = &sink;
    runner::Session session(topo::parse_topology(kTicTocNet), testworld::settings_from(ini), reg, opts);
    (void)session.run();
    if (sink.events.size() != kTicTocEvents) v.fail("recorded " + std::to_string(sink.events.size()) + " events");
    for (std::size_t k = 0; k < sink.events.size(); ++k) {
        const std::int64_t want = static_cast<std::int64_t>(k + 1) * kTicTocStepTicks;
        if (sink.events[k].time.ticks() != want) {
            v.fail("arrival " + std::to_string(k + 1) + " at tick " + std::to_string(sink.events[k].time.ticks()));
            break;
        }
    }
    if (v.ok) v.detail = "identical logs, " + std::to_string(kTicTocEvents) + " arrivals on 0.1 s ticks";
    return v;
}

Verdict native_ping() {
    Verdict v;
    const char* net = R"(
network Net {
    submodules:
        client: PingClient;
        server: PingServer;
    connections:
        client.out --> { delay = 5ms; } --> server.in;
        server.out --> { delay = 5ms; } --> client.in;
}
)";
    RecordingSink sink;
    runner::SessionOptions opts;
    opts.event_sink = &sink;
    runner::Session session(topo::parse_topology(net), testworld::settings_from("[General]\nnetwork = Net\n"),
                            runner::standard_registry(), opts);
    const auto report = session.run();
    if (report.stop_reason != StopReason::Exhausted) v.fail(std::string("stopped: ") + to_string(report.stop_reason));
    int rtt_scalars = 0;
    for (const char* name : {"rtt_min", "rtt_avg", "rtt_max"}) {
        const auto* rec = session.sim().scalars().find("Net.client", name);
        if (!rec) {
            v.fail(std::string(name) + " missing");
            continue;
        }
        const auto* t = std::get_if<SimTime>(&rec->value.storage());
        if (!t) {
            v.fail(std::string(name) + " is not a time");
        } else if (t->ticks() != kPingRttTicks) {
            v.fail(std::string(name) + " = " + std::to_string(t->ticks()) + " ticks");
        }
        ++rtt_scalars;
    }
    // every pong arrives exactly one round trip after its ping left
    std::vector<std::int64_t> sent;
    int pongs = 0;
    for (const auto& e : sink.events) {
        if (e.dst == "Net.server.in") sent.push_back(e.time.ticks() - kPingRttTicks / 2);
        if (e.dst == "Net.client.in") {
            if (static_cast<std::size_t>(pongs) >= sent.size() || e.time.ticks() - sent[pongs] != kPingRttTicks)
                v.fail("pong " + std::to_string(pongs) + " off the round trip");
            ++pongs;
        }
    }
    if (pongs == 0) v.fail("no pongs observed");
    if (v.ok) v.detail = std::to_string(rtt_scalars) + " rtt scalars and " + std::to_string(pongs) + " pongs at 10 ms";
    return v;
}

Verdict bindgen_golden() {
    Verdict v;
    const std::string dir = std::string(POLYSIM_SOURCE_DIR) + "/tests/golden/";
    const auto manifest = bindgen::load_manifest_file(dir + "golden.manifest");
    const auto a = bindgen::generate(manifest);
    const auto b = bindgen::generate(bindgen::load_manifest_file(dir + "golden.manifest"));
    if (a.stub_source != b.stub_source) v.fail("stub output differs between runs");
    if (abi::format_table(a.table) != abi::format_table(b.table)) v.fail("table output differs between runs");
    if (a.stub_source != testworld::read_file(dir + "golden_stubs.py")) v.fail("stub differs from golden file");
    if (abi::format_table(a.table) != testworld::read_file(dir + "golden_table.tsv"))
        v.fail("table differs from golden file");

    // the manifest must exercise every operator the generator knows
    for (const char* sym : {"=", "==", "!=", "++", "--", "+", "-", "<", "<=", ">", ">=", "[]"}) {
        const bool present = std::any_of(manifest.entries.begin(), manifest.entries.end(),
                                         [&](const bindgen::ManifestEntry& e) { return e.op == sym; });
        if (!present) v.fail(std::string("manifest lacks operator ") + sym);
    }
    for (const char* name : {"Foo1_Bar", "Foo2_Bar", "Vec.set", "Vec.sameAs", "Vec.incr", "Shape_Style.width"}) {
        if (!a.table.find(name)) v.fail(std::string("table lacks ") + name);
    }
    if (a.table.find("Bar")) v.fail("unrepaired collision name Bar present");
    if (bindgen::map_operator("=") != "set" || bindgen::map_operator("==") != "sameAs" ||
        bindgen::map_operator("++") != "incr")
        v.fail("operator mapping");
    if (v.ok) v.detail = std::to_string(a.table.entries.size()) + " entries, byte-identical to golden files";
    return v;
}

const char* kGuestTicToc = R"(
network Net {
    submodules:
        tic: TicTocGuest { starter = true; }
        toc: TicTocGuest;
    connections:
        tic.out --> { delay = 100ms; } --> toc.in;
        toc.out --> { delay = 100ms; } --> tic.in;
}
)";

Verdict eager_verification() {
    Verdict v;
    const auto pristine = abi::load_table_file(testworld::kGuestDir + "/polysim/registration.tsv");
    const auto with_params = std::find_if(pristine.entries.begin(), pristine.entries.end(),
                                          [](const abi::RegistrationEntry& e) { return !e.signature.params.empty(); });
    if (with_params == pristine.entries.end()) {
        v.fail("no table entry takes parameters");
        return v;
    }
    const auto pos = static_cast<std::size_t>(with_params - pristine.entries.begin());

    struct Corruption {
        const char* label;
        std::function<void(abi::RegistrationTable&)> apply;
    };
    const std::vector<Corruption> corruptions = {
        {"wrong-return",
         [](abi::RegistrationTable& t) {
             auto& r = t.entries.front().signature.returns;
             r = r == abi::SigType::String ? abi::SigType::Int64 : abi::SigType::String;
         }},
        {"wrong-param",
         [pos](abi::RegistrationTable& t) {
             auto& p = t.entries[pos].signature.params.front();
             p = p == abi::SigType::Float64 ? abi::SigType::Bool : abi::SigType::Float64;
         }},
        {"unknown-name", [](abi::RegistrationTable& t) { t.entries.back().name = "no_such_export"; }},
    };

    const fs::path root = fs::path(TEST_TMP_DIR) / "eager";
    int passed = 0;
    for (const auto& c : corruptions) {
        auto table = pristine;
        c.apply(table);
        const fs::path sdk = root / c.label;
        const fs::path log = sdk / "events.log";
        fs::remove_all(sdk);
        testworld::write_file(sdk / "polysim" / "registration.tsv", abi::format_table(table));
        testworld::write_file(sdk / "net.ned", kGuestTicToc);
        testworld::write_file(sdk / "run.ini", "[General]\nnetwork = Net\nsim-time-limit = 5s\n"
                                               "guest-runtime = inprocess\nguest-module-path = " +
                                                   sdk.string() + "\n");
        std::ostringstream out, err;
        const int code = runner::run_cli({"--topology", (sdk / "net.ned").string(), "--config",
                                          (sdk / "run.ini").string(), "--log", log.string(), "--quiet"},
                                         out, err);
        const std::string text = fs::exists(log) ? testworld::read_file(log) : std::string("<missing>");
        const int events = testworld::event_lines(text);
        if (code != runner::kExitGuestRuntime) {
            v.fail(std::string(c.label) + ": exit " + std::to_string(code));
        } else if (!fs::exists(log) || events != 0) {
            v.fail(std::string(c.label) + ": " + std::to_string(events) + " event lines");
        } else {
            ++passed;
        }
    }
    if (v.ok) v.detail = std::to_string(passed) + " corruptions rejected with exit 4, empty logs";
    return v;
}

const char* kMixedNet = R"(
network Mix {
    submodules:
        tic: TicToc { starter = true; }
        toc: TicToc;
        pinger: PingClient;
        ponger: PingServer;
        client: EtherHostN { appType = "EtherClient"; }
        server: EtherHostN;
    connections:
        tic.out --> { delay = 1ms; } --> toc.in;
        toc.out --> { delay = 1ms; } --> tic.in;
        pinger.out --> { delay = 3ms; } --> ponger.in;
        ponger.out --> { delay = 2ms; } --> pinger.in;
        client.ethOut --> { delay = 50us; datarate = 10Mbps; } --> server.ethIn;
        server.ethOut --> { delay = 50us; datarate = 10Mbps; } --> client.ethIn;
}
)";

Verdict ownership_audit() {
    Verdict v;
    const std::string ini =
        "[General]\nnetwork = Mix\n"
        "Mix.pinger.count = 100000\nMix.pinger.interval = 7ms\n"
        "**.client.app.address = 1\n**.client.app.dest = 2\n"
        "**.client.app.count = 100000\n**.client.app.payloadBytes = 200\n**.client.app.interval = 400us\n";
    runner::Session session(topo::parse_topology(kMixedNet), testworld::settings_from(ini),
                            runner::standard_registry());
    auto& sim = session.sim();
    sim.initialize();
    std::uint64_t audits_failed = 0;
    for (std::uint64_t i = 0; i < kOwnershipEvents; ++i) {
        const auto outcome = sim.step();
        if (outcome.exhausted) {
            v.fail("workload ran dry after " + std::to_string(i) + " events");
            break;
        }
        const auto problems = sim.audit_ownership();
        if (!problems.empty()) {
            if (audits_failed == 0) v.fail("event " + std::to_string(i + 1) + ": " + problems.front());
            ++audits_failed;
        }
    }
    (void)sim.finish();
    const auto& stats = sim.messages().stats();
    if (stats.violations != 0) v.fail(std::to_string(stats.violations) + " transfer violations");
    if (stats.transfers < kOwnershipEvents) v.fail("only " + std::to_string(stats.transfers) + " transfers");
    if (v.ok)
        v.detail = std::to_string(kOwnershipEvents) + " events, " + std::to_string(stats.transfers) +
                   " transfers, 0 violations";
    return v;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        Verdict (*check)();
    };
    const Criterion criteria[] = {
        {"fes-ordering", fes_ordering},
        {"tictoc-determinism", tictoc_determinism},
        {"native-ping-rtt", native_ping},
        {"bindgen-golden", bindgen_golden},
        {"eager-verification", eager_verification},
        {"ownership-audit", ownership_audit},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %s: %s\n", v.ok ? "PASS" : "FAIL", c.name, v.detail.c_str());
        if (!v.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
