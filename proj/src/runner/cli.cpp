#include "polysim/runner/cli.hpp"

#include "polysim/kernel/errors.hpp"
#include "polysim/runner/session.hpp"
#include "polysim/kernel/output.hpp"
#include "polysim/topology/config.hpp"
#include "polysim/topology/parser.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace polysim::runner {

namespace {

struct Flags {
    std::vector<std::string> topologies;
    std::string config;
    std::string section = "General";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> time_limit;
    std::optional<std::uint64_t> event_limit;
    std::optional<std::string> log;
    std::optional<std::string> scalars;
    bool quiet = false;
};

int exit_for(bridge::BridgeErrc code) {
    switch (code) {
    case bridge::BridgeErrc::UnknownGuestClass:
    case bridge::BridgeErrc::GuestConstructorFailure: return kExitElaboration;
    case bridge::BridgeErrc::GuestCallbackFailure: return kExitRunFailure;
    default: return kExitGuestRuntime;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"polysim: discrete-event network simulator", "polysim"};
    app.set_version_flag("--version", "polysim 1.0");
    Flags f;
    app.add_option("--topology", f.topologies, "topology file (repeatable)")->required();
    app.add_option("--config", f.config, "configuration file")->required();
    app.add_option("--section", f.section, "configuration section to run")->capture_default_str();
    app.add_option("--seed", f.seed, "RNG seed (overrides the configuration)");
    app.add_option("--time-limit", f.time_limit, "simulated time limit with unit, e.g. 10s");
    app.add_option("--event-limit", f.event_limit, "maximum number of events");
    app.add_option("--log", f.log, "event log file, or - for standard output");
    app.add_option("--scalars", f.scalars, "scalar results file");
    app.add_flag("--quiet", f.quiet, "suppress module output and the run summary");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "polysim 1.0\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "polysim: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitParse;
    }

    // stage 1: inputs
    topo::TopologyAst ast;
    topo::RunSettings settings;
    try {
        for (const auto& path : f.topologies) ast.merge(topo::parse_topology_file(path));
        settings = topo::resolve(topo::parse_config_file(f.config), f.section);
        if (f.seed) settings.seed = f.seed;
        if (f.event_limit) settings.event_limit = f.event_limit;
        if (f.time_limit) settings.time_limit = SimTime::parse(*f.time_limit);
        const std::filesystem::path base = std::filesystem::path(f.config).parent_path();
        for (auto& dir : settings.guest.module_path) {
            if (std::filesystem::path(dir).is_relative()) dir = (base / dir).lexically_normal().string();
        }
        if (!settings.network) {
            throw topo::TopologyError(topo::TopoErrc::UnknownKey,
                                      "configuration key 'network' is not set in section [" + f.section +
                                          "] or its parents",
                                      f.config, {});
        }
    } catch (const std::exception& e) {
        err << "polysim: " << e.what() << "\n";
        return kExitParse;
    }

    std::ofstream log_file;
    std::ostream* log_stream = nullptr;
    if (f.log) {
        if (*f.log == "-") {
            log_stream = &out;
        } else {
            log_file.open(*f.log, std::ios::binary | std::ios::trunc);
            if (!log_file) {
                err << "polysim: cannot write event log " << *f.log << "\n";
                return kExitRunFailure;
            }
            log_stream = &log_file;
        }
    }
    std::optional<TextEventLog> sink;
    if (log_stream) sink.emplace(*log_stream);

    // stage 2: elaboration, guest construction, validation
    const topo::ModuleTypeRegistry registry = standard_registry();
    std::unique_ptr<Session> session;
    try {
        SessionOptions options;
        options.event_sink = sink ? &*sink : nullptr;
        options.info = f.quiet ? nullptr : &err;
        session = std::make_unique<Session>(ast, settings, registry, options);
    } catch (const bridge::BridgeError& e) {
        err << "polysim: " << e.what() << "\n";
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "polysim: " << e.what() << "\n";
        return kExitElaboration;
    }

    // stage 3: run
    RunReport report;
    try {
        report = session->run();
    } catch (const std::exception& e) {
        report.stop_reason = StopReason::Error;
        report.error_detail = e.what();
        report.final_time = session->sim().now();
        report.events_executed = session->sim().events_dispatched();
    }
    if (sink) sink->write_trailer(report);

    int code = kExitOk;
    if (report.stop_reason == StopReason::Error) {
        err << "polysim: run aborted: " << report.error_detail.value_or("unknown error") << "\n";
        code = kExitRunFailure;
    } else if (!report.finish_complete) {
        err << "polysim: finish failed: " << report.error_detail.value_or("unknown error") << "\n";
        code = kExitRunFailure;
    }

    if (f.scalars) {
        std::ofstream sc(*f.scalars, std::ios::binary | std::ios::trunc);
        session->sim().scalars().write(sc);
        if (!sc) {
            err << "polysim: cannot write scalars " << *f.scalars << "\n";
            code = kExitRunFailure;
        }
    }
    if (log_file.is_open()) {
        log_file.flush();
        if (!log_file) {
            err << "polysim: error writing event log " << *f.log << "\n";
            code = kExitRunFailure;
        }
    }
    if (!f.quiet) err << format_trailer(report).substr(2) << "\n";
    return code;
}

} // namespace polysim::runner
