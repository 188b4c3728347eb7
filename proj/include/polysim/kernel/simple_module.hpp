#pragma once

#include "polysim/kernel/message.hpp"
#include "polysim/kernel/module.hpp"
#include "polysim/kernel/output.hpp"
#include "polysim/kernel/rng.hpp"

#include <string_view>

namespace polysim {

class Simulation;

/// Behavior of a leaf module.
///
/// handle_message() must return without waiting for a future event: a
/// request/response exchange spans two calls, with the response arriving as
/// its own event. Kernel calls are only valid from inside these callbacks.
class SimpleModule {
public:
    SimpleModule() = default;
    SimpleModule(const SimpleModule&) = delete;
    SimpleModule& operator=(const SimpleModule&) = delete;
    virtual ~SimpleModule() = default;

    /// Post-elaboration wiring checks; throw to reject the network.
    virtual void validate() {}
    virtual void initialize() {}
    virtual void handle_message(MessagePtr msg) = 0;
    virtual void finish() {}

    Module& module() const;
    Simulation& sim() const;
    bool attached() const noexcept { return module_ != nullptr; }

protected:
    SimTime now() const;
    MessagePtr new_message(std::string name, std::int64_t kind = 0);
    void send(MessagePtr msg, std::string_view gate_name, int index = -1, int priority = 0);
    void send(MessagePtr msg, Gate& gate, int priority = 0);
    void schedule_at(SimTime t, MessagePtr msg, int priority = 0);
    MessagePtr cancel_event(MessageId id);

    bool has_par(std::string_view name) const { return module().has_par(name); }
    const ParamValue& par(std::string_view name) const { return module().par(name); }
    Gate& gate(std::string_view name, int index = -1) const { return module().gate(name, index); }

    void record_scalar(std::string name, ScalarValue value);
    void log(std::string_view text);
    Rng& rng();

private:
    friend class Simulation;
    void attach(Module& module, Simulation& sim) noexcept {
        module_ = &module;
        sim_ = &sim;
    }

    Module* module_ = nullptr;
    Simulation* sim_ = nullptr;
};

} // namespace polysim
