#include "polysim/kernel/simulation.hpp"

#include "polysim/kernel/errors.hpp"

#include <ostream>

namespace polysim {

Simulation::Simulation(Network network, SimulationOptions options)
    : rng_(options.seed), network_(std::move(network)), options_(options) {
    module_initialized_.assign(network_.size(), false);
    for (const auto& module : network_.modules()) {
        if (auto* behavior = module->behavior()) behavior->attach(*module, *this);
    }
}

Simulation::~Simulation() = default;

void Simulation::install_behavior(Module& module, std::unique_ptr<SimpleModule> behavior) {
    if (!module.is_simple()) {
        throw SimError(SimErrc::InvalidState, "module " + module.path() + " is compound and has no behavior");
    }
    behavior->attach(module, *this);
    module.set_behavior(std::move(behavior));
}

SimpleModule& Simulation::behavior_of(Module& module) {
    auto* behavior = module.behavior();
    if (behavior == nullptr) {
        throw SimError(SimErrc::InvalidState, "simple module " + module.path() + " has no behavior installed");
    }
    return *behavior;
}

MessagePtr Simulation::create_message(Module& owner, std::string name, std::int64_t kind) {
    return tracker_.create(std::move(name), kind, now_, Owner::module(owner.id()));
}

void Simulation::schedule_at(Module& self, SimTime t, MessagePtr msg, int priority) {
    if (!msg) throw SimError(SimErrc::InvalidState, "schedule_at() called with a null message");
    if (t < now_) {
        throw SimError(SimErrc::SchedulingInPast, "module " + self.path() + " scheduled '" + msg->name() + "' at t=" +
                                                      t.str() + ", before now=" + now_.str());
    }
    tracker_.transfer(*msg, Owner::module(self.id()), Owner::fes());
    msg->src_gate_.reset();
    msg->dst_gate_.reset();
    msg->self_ = true;
    msg->target_ = self.id();
    msg->send_time_ = now_;
    msg->arrival_time_ = t;
    fes_.insert(t, priority, std::move(msg));
}

void Simulation::send(Module& self, MessagePtr msg, Gate& out_gate, int priority) {
    if (!msg) throw SimError(SimErrc::InvalidState, "send() called with a null message");
    if (&out_gate.owner() != &self) {
        throw SimError(SimErrc::UnknownGate,
                       "module " + self.path() + " cannot send through gate of " + out_gate.owner().path());
    }
    if (out_gate.direction() != GateDirection::Output) {
        throw SimError(SimErrc::WrongDirection,
                       "gate " + self.path() + "." + out_gate.full_name() + " is an input gate");
    }
    Gate* end = out_gate.path_end();
    if (end == &out_gate || end->direction() != GateDirection::Input || !end->owner().is_simple()) {
        throw SimError(SimErrc::UnconnectedGate,
                       "gate " + self.path() + "." + out_gate.full_name() + " is not connected to a simple module");
    }
    const SimTime arrival = now_ + path_duration(out_gate, msg->byte_length());
    tracker_.transfer(*msg, Owner::module(self.id()), Owner::fes());
    msg->src_gate_ = out_gate.ref();
    msg->dst_gate_ = end->ref();
    msg->self_ = false;
    msg->target_ = end->owner().id();
    msg->send_time_ = now_;
    msg->arrival_time_ = arrival;
    fes_.insert(arrival, priority, std::move(msg));
}

MessagePtr Simulation::cancel_event(Module& self, MessageId id) {
    const Message* msg = tracker_.find(id);
    if (msg == nullptr || msg->owner() != Owner::fes() || !fes_.contains(id)) {
        throw SimError(SimErrc::NotScheduled, "message " + std::to_string(id) + " is not scheduled");
    }
    if (!msg->is_self_message() || msg->target_ != self.id()) {
        throw SimError(SimErrc::NotScheduled,
                       "message '" + msg->name() + "' is not a self-message of " + self.path());
    }
    auto entry = fes_.remove(id);
    tracker_.transfer(*entry->message, Owner::fes(), Owner::module(self.id()));
    return std::move(entry->message);
}

SimTime Simulation::path_duration(const Gate& out_gate, std::int64_t byte_length) const {
    SimTime total;
    for (const Gate* g = &out_gate; g->next() != nullptr; g = g->next()) {
        if (const auto& channel = g->channel()) total += channel->delay + channel->transmission_duration(byte_length);
    }
    return total;
}

SimTime Simulation::transmission_duration(const Gate& out_gate, std::int64_t byte_length) const {
    SimTime total;
    for (const Gate* g = &out_gate; g->next() != nullptr; g = g->next()) {
        if (const auto& channel = g->channel()) total += channel->transmission_duration(byte_length);
    }
    return total;
}

void Simulation::log(const Module& module, std::string_view text) {
    if (options_.info != nullptr) *options_.info << "[t=" << now_.str() << "] " << module.path() << ": " << text << '\n';
}

void Simulation::validate() {
    for (Module* module : network_.by_path()) {
        if (!module->is_simple()) continue;
        auto& behavior = behavior_of(*module);
        try {
            behavior.validate();
        } catch (const SimError& e) {
            if (e.code() == SimErrc::ValidationFailure) throw;
            throw SimError(SimErrc::ValidationFailure, module->path() + ": " + e.what());
        } catch (const std::exception& e) {
            throw SimError(SimErrc::ValidationFailure, module->path() + ": " + e.what());
        }
    }
}

void Simulation::initialize() {
    if (initialized_) return;
    initialized_ = true;
    for (Module* module : network_.by_path()) {
        if (!module->is_simple()) continue;
        auto& behavior = behavior_of(*module);
        try {
            behavior.initialize();
        } catch (const std::exception& e) {
            throw CallbackFailure(module->path(), "initialize", e.what());
        }
        module_initialized_[static_cast<std::size_t>(module->id())] = true;
    }
}

std::string Simulation::endpoint_name(const GateRef& ref) const {
    const Gate& g = network_.gate(ref);
    return g.owner().path() + "." + g.full_name();
}

StepOutcome Simulation::step() {
    StepOutcome outcome;
    if (fes_.empty()) return outcome;
    auto entry = fes_.pop();
    now_ = entry.key.time;
    MessagePtr msg = std::move(entry.message);
    Module& target = network_.module(msg->target_);
    tracker_.transfer(*msg, Owner::fes(), Owner::module(target.id()));

    outcome.exhausted = false;
    auto& record = outcome.event;
    record.number = ++event_number_;
    record.time = now_;
    record.src = msg->is_self_message() ? "self" : endpoint_name(*msg->src_gate_);
    record.dst = msg->is_self_message() ? target.path() : endpoint_name(*msg->dst_gate_);
    record.msg_name = msg->name();
    record.kind = msg->kind();
    if (options_.event_sink != nullptr) options_.event_sink->on_event(record);

    auto& behavior = behavior_of(target);
    try {
        behavior.handle_message(std::move(msg));
    } catch (const std::exception& e) {
        throw CallbackFailure(target.path(), "handle_message", e.what());
    }
    return outcome;
}

RunReport Simulation::run(const RunLimits& limits) {
    RunReport report;
    const std::uint64_t first_event = event_number_;
    try {
        initialize();
        for (;;) {
            if (limits.event_limit && event_number_ - first_event >= *limits.event_limit) {
                report.stop_reason = StopReason::EventLimit;
                break;
            }
            const auto next = fes_.peek();
            if (!next) {
                report.stop_reason = StopReason::Exhausted;
                break;
            }
            if (limits.time_limit && next->time > *limits.time_limit) {
                report.stop_reason = StopReason::TimeLimit;
                break;
            }
            step();
        }
    } catch (const std::exception& e) {
        report.stop_reason = StopReason::Error;
        report.error_detail = e.what();
    }
    std::string finish_detail;
    report.finish_complete = finish(&finish_detail);
    if (!report.finish_complete) {
        if (report.stop_reason == StopReason::Error) {
            *report.error_detail += "; partial finish: " + finish_detail;
        } else {
            report.stop_reason = StopReason::Error;
            report.error_detail = finish_detail;
        }
    }
    report.events_executed = event_number_ - first_event;
    report.final_time = now_;
    return report;
}

bool Simulation::finish(std::string* detail) {
    if (finished_) return true;
    finished_ = true;
    bool complete = true;
    for (Module* module : network_.by_path()) {
        if (!module->is_simple() || !module_initialized_[static_cast<std::size_t>(module->id())]) continue;
        try {
            behavior_of(*module).finish();
        } catch (const std::exception& e) {
            complete = false;
            if (detail != nullptr) {
                if (!detail->empty()) *detail += "; ";
                *detail += CallbackFailure(module->path(), "finish", e.what()).what();
            }
        }
    }
    return complete;
}

std::vector<std::string> Simulation::audit_ownership() const {
    std::vector<std::string> problems;
    std::size_t fes_owned = 0;
    for (const Message* msg : tracker_.live_messages()) {
        const Owner owner = msg->owner();
        if (owner == Owner::fes()) {
            ++fes_owned;
            if (!fes_.contains(msg->id())) {
                problems.push_back("message " + std::to_string(msg->id()) + " tagged fes but not scheduled");
            }
        } else if (owner.kind() == Owner::Kind::None) {
            problems.push_back("message " + std::to_string(msg->id()) + " has no owner");
        } else if (fes_.contains(msg->id())) {
            problems.push_back("message " + std::to_string(msg->id()) + " is scheduled but tagged " + owner.str());
        }
    }
    if (fes_owned != fes_.size()) {
        problems.push_back("fes holds " + std::to_string(fes_.size()) + " entries but " + std::to_string(fes_owned) +
                           " messages are tagged fes");
    }
    const auto& stats = tracker_.stats();
    if (stats.created - stats.destroyed != tracker_.live_count()) {
        problems.push_back("created - destroyed != live message count");
    }
    return problems;
}

} // namespace polysim
