#include "polysim/kernel/output.hpp"

#include <algorithm>
#include <charconv>

namespace polysim {

const char* to_string(StopReason reason) noexcept {
    switch (reason) {
    case StopReason::Exhausted: return "exhausted";
    case StopReason::TimeLimit: return "time_limit";
    case StopReason::EventLimit: return "event_limit";
    case StopReason::Error: return "error";
    }
    return "?";
}

std::string format_event_line(const EventRecord& r) {
    std::string line = "#" + std::to_string(r.number) + " t=" + r.time.str() + " " + r.src + " -> " + r.dst +
                       " msg=" + r.msg_name + " kind=" + std::to_string(r.kind);
    return line;
}

std::string format_trailer(const RunReport& report) {
    return "# run: events=" + std::to_string(report.events_executed) + " time=" + report.final_time.str() +
           " reason=" + to_string(report.stop_reason);
}

void TextEventLog::on_event(const EventRecord& record) { *out_ << format_event_line(record) << '\n' << std::flush; }

void TextEventLog::write_trailer(const RunReport& report) { *out_ << format_trailer(report) << '\n' << std::flush; }

std::string ScalarValue::str() const {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(SimTime v) const { return v.str(); }
        std::string operator()(double v) const {
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, end);
        }
    };
    return std::visit(Visitor{}, value_);
}

const ScalarRecord* ScalarStore::find(std::string_view module_path, std::string_view name) const {
    for (const auto& r : records_) {
        if (r.module_path == module_path && r.name == name) return &r;
    }
    return nullptr;
}

void ScalarStore::write(std::ostream& out) const {
    std::vector<const ScalarRecord*> sorted;
    sorted.reserve(records_.size());
    for (const auto& r : records_) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScalarRecord* a, const ScalarRecord* b) { return a->module_path < b->module_path; });
    for (const auto* r : sorted) out << r->module_path << '\t' << r->name << '\t' << r->value.str() << '\n';
}

} // namespace polysim
