#pragma once

#include "polysim/kernel/message.hpp"
#include "polysim/kernel/param.hpp"
#include "polysim/kernel/simtime.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polysim {

class Module;
class SimpleModule;

enum class GateDirection { Input, Output };

const char* to_string(GateDirection dir) noexcept;

/// Link attributes: propagation delay plus optional serialization rate.
struct Channel {
    SimTime delay;
    std::optional<std::int64_t> datarate; // bits per second

    /// ceil(bytes * 8 / datarate) seconds, in ticks; zero without a datarate.
    SimTime transmission_duration(std::int64_t byte_length) const;

    friend bool operator==(const Channel&, const Channel&) = default;
};

class Gate {
public:
    Module& owner() const noexcept { return *owner_; }
    const std::string& name() const noexcept { return name_; }
    /// Index inside a gate vector, or -1 for a scalar gate.
    int index() const noexcept { return index_; }
    GateDirection direction() const noexcept { return direction_; }
    bool required() const noexcept { return required_; }
    GateRef ref() const noexcept;

    /// "out" or "upperIn[0]".
    std::string full_name() const;

    /// The gate this one forwards to, with the channel of that hop.
    Gate* next() const noexcept { return next_; }
    Gate* previous() const noexcept { return previous_; }
    const std::optional<Channel>& channel() const noexcept { return channel_; }

    /// Follows next() to the end of the chain.
    Gate* path_end() const noexcept;

    void connect_to(Gate& target, std::optional<Channel> channel);

private:
    friend class Module;
    Gate(Module* owner, std::uint32_t slot, std::string name, int index, GateDirection dir, bool required)
        : owner_(owner), slot_(slot), name_(std::move(name)), index_(index), direction_(dir), required_(required) {}

    Module* owner_;
    std::uint32_t slot_;
    std::string name_;
    int index_;
    GateDirection direction_;
    bool required_;
    Gate* next_ = nullptr;
    Gate* previous_ = nullptr;
    std::optional<Channel> channel_;
};

/// A node of the module tree. Simple modules carry a behavior; compound
/// modules are pure structure.
class Module {
public:
    Module(ModuleId id, std::string name, std::string path, std::string type_name, Module* parent, bool simple);
    Module(const Module&) = delete;
    Module& operator=(const Module&) = delete;
    ~Module();

    ModuleId id() const noexcept { return id_; }
    /// Local name including a vector index, e.g. "host[0]".
    const std::string& name() const noexcept { return name_; }
    /// Hierarchical path, e.g. "Net.host[0].app".
    const std::string& path() const noexcept { return path_; }
    const std::string& type_name() const noexcept { return type_name_; }
    Module* parent() const noexcept { return parent_; }
    bool is_simple() const noexcept { return simple_; }

    const std::vector<Module*>& children() const noexcept { return children_; }
    void add_child(Module& child) { children_.push_back(&child); }

    bool has_par(std::string_view name) const;
    const ParamValue& par(std::string_view name) const;
    void set_par(std::string name, ParamValue value) { params_[std::move(name)] = std::move(value); }
    const std::map<std::string, ParamValue, std::less<>>& params() const noexcept { return params_; }

    Gate& add_gate(std::string name, int index, GateDirection dir, bool required = false);
    Gate* find_gate(std::string_view name, int index = -1) noexcept;
    Gate& gate(std::string_view name, int index = -1);
    Gate& gate_at(std::uint32_t slot) { return gates_.at(slot); }
    const std::deque<Gate>& gates() const noexcept { return gates_; }
    std::deque<Gate>& gates() noexcept { return gates_; }

    SimpleModule* behavior() const noexcept { return behavior_.get(); }
    void set_behavior(std::unique_ptr<SimpleModule> behavior);

private:
    ModuleId id_;
    std::string name_;
    std::string path_;
    std::string type_name_;
    Module* parent_;
    bool simple_;
    std::vector<Module*> children_;
    std::map<std::string, ParamValue, std::less<>> params_;
    std::deque<Gate> gates_;
    std::unique_ptr<SimpleModule> behavior_;
};

/// The module tree of one network instance; ids are dense and index `modules()`.
class Network {
public:
    Network() = default;
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    Module& add_module(std::string name, std::string type_name, Module* parent, bool simple);

    Module& module(ModuleId id) const { return *modules_.at(static_cast<std::size_t>(id)); }
    Module* find(std::string_view path) const;
    Gate& gate(GateRef ref) const { return module(ref.module).gate_at(ref.slot); }
    std::size_t size() const noexcept { return modules_.size(); }
    const std::vector<std::unique_ptr<Module>>& modules() const noexcept { return modules_; }
    Module* root() const noexcept { return modules_.empty() ? nullptr : modules_.front().get(); }

    /// Modules sorted by path string.
    std::vector<Module*> by_path() const;

private:
    std::vector<std::unique_ptr<Module>> modules_;
    std::map<std::string, ModuleId, std::less<>> by_path_;
};

} // namespace polysim
