#pragma once

#include "polysim/kernel/simtime.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace polysim {

enum class StopReason { Exhausted, TimeLimit, EventLimit, Error };

const char* to_string(StopReason reason) noexcept;

struct RunReport {
    std::uint64_t events_executed = 0;
    SimTime final_time;
    StopReason stop_reason = StopReason::Exhausted;
    std::optional<std::string> error_detail;
    /// False if finish() raised for at least one module.
    bool finish_complete = true;
};

/// One dispatched event as it appears in the event log.
struct EventRecord {
    std::uint64_t number = 0;
    SimTime time;
    std::string src; // "<module>.<gate>" or "self"
    std::string dst; // "<module>.<gate>", or the module path for a self-message
    std::string msg_name;
    std::int64_t kind = 0;
};

/// `#<n> t=<seconds> <src> -> <dst> msg=<name> kind=<kind>`
std::string format_event_line(const EventRecord& record);
/// `# run: events=<n> time=<t> reason=<r>`
std::string format_trailer(const RunReport& report);

class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_event(const EventRecord& record) = 0;
};

/// Streams event lines as they are dispatched, flushing each one so that an
/// aborted run keeps its partial log.
class TextEventLog final : public EventSink {
public:
    explicit TextEventLog(std::ostream& out) : out_(&out) {}
    void on_event(const EventRecord& record) override;
    void write_trailer(const RunReport& report);

private:
    std::ostream* out_;
};

class ScalarValue {
public:
    using Storage = std::variant<std::int64_t, double, SimTime>;
    ScalarValue(std::int64_t v) : value_(v) {}
    ScalarValue(int v) : value_(static_cast<std::int64_t>(v)) {}
    ScalarValue(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
    ScalarValue(double v) : value_(v) {}
    ScalarValue(SimTime v) : value_(v) {}

    const Storage& storage() const noexcept { return value_; }
    std::string str() const;

    friend bool operator==(const ScalarValue&, const ScalarValue&) = default;

private:
    Storage value_;
};

struct ScalarRecord {
    std::string module_path;
    std::string name;
    ScalarValue value;
};

class ScalarStore {
public:
    void record(std::string module_path, std::string name, ScalarValue value) {
        records_.push_back({std::move(module_path), std::move(name), value});
    }
    const std::vector<ScalarRecord>& records() const noexcept { return records_; }
    const ScalarRecord* find(std::string_view module_path, std::string_view name) const;

    /// `<module-path>\t<name>\t<value>` lines sorted by module path; records of
    /// one module keep their recording order.
    void write(std::ostream& out) const;

private:
    std::vector<ScalarRecord> records_;
};

} // namespace polysim
