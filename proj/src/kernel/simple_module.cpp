#include "polysim/kernel/simple_module.hpp"

#include "polysim/kernel/errors.hpp"
#include "polysim/kernel/simulation.hpp"

namespace polysim {

Module& SimpleModule::module() const {
    if (module_ == nullptr) throw SimError(SimErrc::InvalidState, "module behavior is not attached to a simulation");
    return *module_;
}

Simulation& SimpleModule::sim() const {
    if (sim_ == nullptr) throw SimError(SimErrc::InvalidState, "module behavior is not attached to a simulation");
    return *sim_;
}

SimTime SimpleModule::now() const { return sim().now(); }

MessagePtr SimpleModule::new_message(std::string name, std::int64_t kind) {
    return sim().create_message(module(), std::move(name), kind);
}

void SimpleModule::send(MessagePtr msg, std::string_view gate_name, int index, int priority) {
    sim().send(module(), std::move(msg), module().gate(gate_name, index), priority);
}

void SimpleModule::send(MessagePtr msg, Gate& gate, int priority) { sim().send(module(), std::move(msg), gate, priority); }

void SimpleModule::schedule_at(SimTime t, MessagePtr msg, int priority) {
    sim().schedule_at(module(), t, std::move(msg), priority);
}

MessagePtr SimpleModule::cancel_event(MessageId id) { return sim().cancel_event(module(), id); }

void SimpleModule::record_scalar(std::string name, ScalarValue value) {
    sim().scalars().record(module().path(), std::move(name), value);
}

void SimpleModule::log(std::string_view text) { sim().log(module(), text); }

Rng& SimpleModule::rng() { return sim().rng(); }

} // namespace polysim
