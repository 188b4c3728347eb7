#pragma once

// Helpers shared by the bridge, model, runner and acceptance tests: building
// run settings from config text and running a topology to completion.

#include "polysim/bridge/inprocess.hpp"
#include "polysim/kernel/output.hpp"
#include "polysim/runner/session.hpp"
#include "polysim/topology/config.hpp"
#include "polysim/topology/parser.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

namespace testworld {

#ifdef POLYSIM_GUEST_DIR
inline const std::string kGuestDir = POLYSIM_GUEST_DIR;
#endif

inline polysim::topo::RunSettings settings_from(const std::string& ini, const std::string& section = "General") {
    return polysim::topo::resolve(polysim::topo::parse_config(ini, "<test.ini>"), section);
}

#ifdef POLYSIM_GUEST_DIR
/// Config selecting `network` and the in-process runtime over the built SDK.
inline std::string guest_ini(const std::string& network, const std::string& extra = {},
                             const std::string& module_dir = kGuestDir) {
    return "[General]\nnetwork = " + network + "\nguest-runtime = inprocess\nguest-module-path = " + module_dir +
           "\n" + extra;
}
#endif

/// In-process runtime factory that also registers test-only guest classes.
inline polysim::runner::RuntimeFactory inprocess_with(
    std::function<void(polysim::bridge::InProcessRuntime&)> add_classes) {
    return [add_classes](const std::string&) -> std::unique_ptr<polysim::bridge::GuestRuntime> {
        auto rt = std::make_unique<polysim::bridge::InProcessRuntime>();
        if (add_classes) add_classes(*rt);
        return rt;
    };
}

struct Outcome {
    std::string log;
    std::string scalars;
    polysim::RunReport report;
    std::string info;
};

inline Outcome run_topology(const std::string& topology, const std::string& ini,
                            const polysim::topo::ModuleTypeRegistry& registry,
                            polysim::runner::RuntimeFactory factory = polysim::runner::default_runtime_factory,
                            const std::string& section = "General") {
    std::ostringstream log, info;
    polysim::TextEventLog sink(log);
    polysim::runner::SessionOptions opts;
    opts.event_sink = &sink;
    opts.info = &info;
    opts.runtime_factory = std::move(factory);
    Outcome out;
    {
        polysim::runner::Session session(polysim::topo::parse_topology(topology, "<test.ned>"),
                                         settings_from(ini, section), registry, opts);
        out.report = session.run();
        std::ostringstream sc;
        session.sim().scalars().write(sc);
        out.scalars = sc.str();
    }
    sink.write_trailer(out.report);
    out.log = log.str();
    out.info = info.str();
    return out;
}

/// Number of event lines (lines starting with `#<digit>`).
inline std::size_t event_lines(const std::string& log) {
    std::size_t n = 0;
    std::istringstream in(log);
    for (std::string line; std::getline(in, line);) {
        if (line.size() > 1 && line[0] == '#' && line[1] >= '0' && line[1] <= '9') ++n;
    }
    return n;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

} // namespace testworld
