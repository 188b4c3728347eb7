#pragma once

#include "polysim/kernel/fes.hpp"
#include "polysim/kernel/message.hpp"
#include "polysim/kernel/module.hpp"
#include "polysim/kernel/output.hpp"
#include "polysim/kernel/rng.hpp"
#include "polysim/kernel/simple_module.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polysim {

struct RunLimits {
    /// Inclusive: events with arrival_time <= time_limit run.
    std::optional<SimTime> time_limit;
    std::optional<std::uint64_t> event_limit;
};

struct SimulationOptions {
    std::uint64_t seed = 1;
    EventSink* event_sink = nullptr;
    /// Destination of module log() output; discarded when null.
    std::ostream* info = nullptr;
};

struct StepOutcome {
    bool exhausted = true;
    EventRecord event;
};

/// Single-threaded discrete-event kernel. Not re-entrant except through the
/// callback path (dispatch -> module -> send/schedule/cancel).
class Simulation {
public:
    explicit Simulation(Network network, SimulationOptions options = {});
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;
    ~Simulation();

    SimTime now() const noexcept { return now_; }
    Network& network() noexcept { return network_; }
    const Network& network() const noexcept { return network_; }
    MessageTracker& messages() noexcept { return tracker_; }
    const MessageTracker& messages() const noexcept { return tracker_; }
    const FutureEventSet& fes() const noexcept { return fes_; }
    ScalarStore& scalars() noexcept { return scalars_; }
    const ScalarStore& scalars() const noexcept { return scalars_; }
    Rng& rng() noexcept { return rng_; }

    /// Installs (or replaces) the behavior of a simple module and attaches it.
    void install_behavior(Module& module, std::unique_ptr<SimpleModule> behavior);

    MessagePtr create_message(Module& owner, std::string name, std::int64_t kind = 0);
    void schedule_at(Module& self, SimTime t, MessagePtr msg, int priority = 0);
    void send(Module& self, MessagePtr msg, Gate& out_gate, int priority = 0);
    MessagePtr cancel_event(Module& self, MessageId id);
    /// Sum of propagation and serialization time along the path from `out_gate`.
    SimTime path_duration(const Gate& out_gate, std::int64_t byte_length) const;
    /// Serialization time only, over the datarate channels of the path.
    SimTime transmission_duration(const Gate& out_gate, std::int64_t byte_length) const;

    void log(const Module& module, std::string_view text);

    /// Runs every simple module's validate() hook in path order.
    void validate();
    /// Calls initialize() on every simple module in path order; throws CallbackFailure.
    void initialize();
    bool initialized() const noexcept { return initialized_; }

    StepOutcome step();
    /// Initializes if needed, steps until a limit or exhaustion, then finishes.
    RunReport run(const RunLimits& limits = {});
    /// Calls finish() on initialized modules in path order; returns false if one raised.
    bool finish(std::string* detail = nullptr);

    std::uint64_t events_dispatched() const noexcept { return event_number_; }

    /// Cross-checks owner tags against actual holders; empty when consistent.
    std::vector<std::string> audit_ownership() const;

private:
    SimpleModule& behavior_of(Module& module);
    std::string endpoint_name(const GateRef& ref) const;

    MessageTracker tracker_;
    ScalarStore scalars_;
    Rng rng_;
    FutureEventSet fes_;
    Network network_;
    SimulationOptions options_;
    SimTime now_;
    std::uint64_t event_number_ = 0;
    bool initialized_ = false;
    bool finished_ = false;
    std::vector<bool> module_initialized_;
};

} // namespace polysim
