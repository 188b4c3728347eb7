#include "polysim/kernel/module.hpp"

#include "polysim/kernel/errors.hpp"
#include "polysim/kernel/simple_module.hpp"

#include <algorithm>

namespace polysim {

namespace {
__extension__ using Wide = __int128;
}

const char* to_string(GateDirection dir) noexcept { return dir == GateDirection::Input ? "input" : "output"; }

SimTime Channel::transmission_duration(std::int64_t byte_length) const {
    if (!datarate || byte_length <= 0) return SimTime::zero();
    const Wide bits = static_cast<Wide>(byte_length) * 8;
    const Wide numerator = bits * SimTime::kTicksPerSecond;
    const Wide ticks = (numerator + *datarate - 1) / *datarate;
    if (ticks > INT64_MAX) throw SimError(SimErrc::TimeOverflow, "transmission duration overflows simulation time");
    return SimTime::from_ticks(static_cast<std::int64_t>(ticks));
}

GateRef Gate::ref() const noexcept { return GateRef{owner_->id(), slot_}; }

std::string Gate::full_name() const {
    if (index_ < 0) return name_;
    return name_ + "[" + std::to_string(index_) + "]";
}

Gate* Gate::path_end() const noexcept {
    const Gate* g = this;
    while (g->next_ != nullptr) g = g->next_;
    return const_cast<Gate*>(g);
}

void Gate::connect_to(Gate& target, std::optional<Channel> channel) {
    next_ = &target;
    target.previous_ = this;
    channel_ = std::move(channel);
}

Module::Module(ModuleId id, std::string name, std::string path, std::string type_name, Module* parent, bool simple)
    : id_(id),
      name_(std::move(name)),
      path_(std::move(path)),
      type_name_(std::move(type_name)),
      parent_(parent),
      simple_(simple) {}

Module::~Module() = default;

bool Module::has_par(std::string_view name) const { return params_.find(name) != params_.end(); }

const ParamValue& Module::par(std::string_view name) const {
    auto it = params_.find(name);
    if (it == params_.end()) {
        throw SimError(SimErrc::UnknownParameter, "module " + path_ + " has no parameter '" + std::string(name) + "'");
    }
    return it->second;
}

Gate& Module::add_gate(std::string name, int index, GateDirection dir, bool required) {
    const auto slot = static_cast<std::uint32_t>(gates_.size());
    gates_.push_back(Gate(this, slot, std::move(name), index, dir, required));
    return gates_.back();
}

Gate* Module::find_gate(std::string_view name, int index) noexcept {
    for (auto& g : gates_) {
        if (g.name() == name && g.index() == index) return &g;
    }
    return nullptr;
}

Gate& Module::gate(std::string_view name, int index) {
    if (Gate* g = find_gate(name, index)) return *g;
    std::string full(name);
    if (index >= 0) full += "[" + std::to_string(index) + "]";
    throw SimError(SimErrc::UnknownGate, "module " + path_ + " has no gate '" + full + "'");
}

void Module::set_behavior(std::unique_ptr<SimpleModule> behavior) { behavior_ = std::move(behavior); }

Module& Network::add_module(std::string name, std::string type_name, Module* parent, bool simple) {
    const auto id = static_cast<ModuleId>(modules_.size());
    std::string path = parent == nullptr ? name : parent->path() + "." + name;
    auto module = std::make_unique<Module>(id, std::move(name), path, std::move(type_name), parent, simple);
    if (parent != nullptr) parent->add_child(*module);
    by_path_.emplace(std::move(path), id);
    modules_.push_back(std::move(module));
    return *modules_.back();
}

Module* Network::find(std::string_view path) const {
    auto it = by_path_.find(path);
    return it == by_path_.end() ? nullptr : modules_[static_cast<std::size_t>(it->second)].get();
}

std::vector<Module*> Network::by_path() const {
    std::vector<Module*> out;
    out.reserve(by_path_.size());
    for (const auto& [path, id] : by_path_) out.push_back(modules_[static_cast<std::size_t>(id)].get());
    return out;
}

} // namespace polysim
