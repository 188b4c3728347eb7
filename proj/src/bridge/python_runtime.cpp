#include "polysim/bridge/python_runtime.hpp"

#include "polysim/kernel/errors.hpp"

#include <pybind11/embed.h>

#include <cstdlib>
#include <filesystem>
#include <limits>

namespace py = pybind11;

namespace polysim::bridge {

struct PythonRuntime::State {
    GuestBridge* bridge = nullptr;
    std::string table_path;
    std::vector<std::string> module_path;
    std::vector<std::string> added_paths;
    std::set<std::string> modules_before;
    std::map<std::uint64_t, py::object> objects;
    std::map<std::uint64_t, std::string> class_of;
    std::uint64_t next_token = 1;
    bool running = false;
};

namespace {

PythonRuntime::State* g_active = nullptr;

py::object& host_error() {
    static py::object* type = nullptr;
    if (type == nullptr) type = new py::object(py::module_::import("_polysim_host").attr("HostError"));
    return *type;
}

py::object& stale_error() {
    static py::object* type = nullptr;
    if (type == nullptr) type = new py::object(py::module_::import("_polysim_host").attr("StaleHandleError"));
    return *type;
}

[[noreturn]] void raise_python(py::object& type, const std::string& text) {
    PyErr_SetString(type.ptr(), text.c_str());
    throw py::error_already_set();
}

// Outside a run every handle a guest may still hold is stale, so calls made
// then raise StaleHandleError rather than the generic host error.
PythonRuntime::State& active(bool calling) {
    if (g_active == nullptr || g_active->bridge == nullptr) {
        raise_python(calling ? stale_error() : host_error(),
                     std::string(calling ? "StaleHandle: " : "") + "no simulation is running in this process");
    }
    return *g_active;
}

std::string format_python_error(py::error_already_set& e) {
    try {
        py::object tb = py::module_::import("traceback");
        py::object lines = tb.attr("format_exception")(e.type(), e.value(), e.trace());
        std::string out;
        for (auto line : lines) out += line.cast<std::string>();
        while (!out.empty() && out.back() == '\n') out.pop_back();
        return out;
    } catch (...) {
        return e.what();
    }
}

bool is_plain_int(PyObject* o) { return PyLong_Check(o) && !PyBool_Check(o); }

std::int64_t to_int64(PyObject* o, const std::string& what) {
    int overflow = 0;
    const long long v = PyLong_AsLongLongAndOverflow(o, &overflow);
    if (overflow != 0) raise_python(host_error(), what + ": integer out of range");
    return static_cast<std::int64_t>(v);
}

abi::Value from_python(const py::handle& obj, abi::SigType type, const std::string& what) {
    PyObject* o = obj.ptr();
    auto mismatch = [&](const char* expected) -> abi::Value {
        raise_python(host_error(), what + ": expected " + expected + ", got " +
                                       std::string(Py_TYPE(o)->tp_name));
    };
    switch (type) {
    case abi::SigType::Int64:
        if (!is_plain_int(o)) return mismatch("int");
        return to_int64(o, what);
    case abi::SigType::Float64:
        if (PyFloat_Check(o)) return PyFloat_AsDouble(o);
        if (is_plain_int(o)) return static_cast<double>(to_int64(o, what));
        return mismatch("float");
    case abi::SigType::String:
        if (!PyUnicode_Check(o)) return mismatch("str");
        return obj.cast<std::string>();
    case abi::SigType::Bool:
        if (!PyBool_Check(o)) return mismatch("bool");
        return o == Py_True;
    case abi::SigType::Handle: {
        if (!is_plain_int(o)) return mismatch("handle (int)");
        const std::int64_t v = to_int64(o, what);
        if (v < 0) raise_python(host_error(), what + ": negative handle");
        return abi::Handle{static_cast<std::uint64_t>(v)};
    }
    case abi::SigType::SimTime:
        if (!is_plain_int(o)) return mismatch("simtime (int ticks)");
        return SimTime::from_ticks(to_int64(o, what));
    case abi::SigType::Void: break;
    }
    return mismatch("nothing");
}

py::object to_python(const abi::Value& v) {
    struct V {
        py::object operator()(std::monostate) const { return py::none(); }
        py::object operator()(std::int64_t x) const { return py::int_(x); }
        py::object operator()(double x) const { return py::float_(x); }
        py::object operator()(const std::string& x) const { return py::str(x); }
        py::object operator()(bool x) const { return py::bool_(x); }
        py::object operator()(abi::Handle h) const { return py::int_(h.value); }
        py::object operator()(SimTime t) const { return py::int_(t.ticks()); }
    };
    return std::visit(V{}, v);
}

std::string joined(const std::vector<std::string>& dirs) {
    if (dirs.empty()) return "(empty)";
    std::string out;
    for (const auto& d : dirs) out += (out.empty() ? "" : ":") + d;
    return out;
}

void ensure_interpreter(const std::string& runtime_path) {
    if (Py_IsInitialized()) return;
    if (!runtime_path.empty()) {
        namespace fs = std::filesystem;
        const fs::path lib = fs::path(runtime_path) / "lib" /
                             ("python" + std::to_string(PY_MAJOR_VERSION) + "." + std::to_string(PY_MINOR_VERSION));
        std::error_code ec;
        if (!fs::is_directory(lib, ec)) {
            throw BridgeError(BridgeErrc::RuntimeStartFailure,
                              "guest-runtime-path " + runtime_path + " is not a Python " +
                                  std::to_string(PY_MAJOR_VERSION) + "." + std::to_string(PY_MINOR_VERSION) +
                                  " installation (missing " + lib.string() + ")");
        }
        ::setenv("PYTHONHOME", runtime_path.c_str(), 1);
    }
    py::initialize_interpreter();
}

} // namespace

PYBIND11_EMBEDDED_MODULE(_polysim_host, m) {
    m.doc() = "Host side of the guest bridge. Available only inside the simulator.";
    auto host_error_type = py::exception<std::runtime_error>(m, "HostError", PyExc_RuntimeError);
    py::exception<std::runtime_error>(m, "StaleHandleError", host_error_type.ptr());

    m.def("bind_peer", [](py::object obj) -> std::uint64_t {
        PythonRuntime::State& s = active(false);
        const std::uint64_t token = s.next_token++;
        try {
            const PeerPair pair = s.bridge->bind_peer(token);
            s.objects[token] = std::move(obj);
            return pair.host.value;
        } catch (const std::exception& e) {
            raise_python(host_error(), e.what());
        }
    });

    m.def("call", [](const std::string& name, py::args args) -> py::object {
        PythonRuntime::State& s = active(true);
        const ExportEntry* e = s.bridge->exports().find(name);
        if (e == nullptr) raise_python(host_error(), "UnknownExport: no kernel export named '" + name + "'");
        const auto& params = e->signature.params;
        if (args.size() != params.size()) {
            raise_python(host_error(), "ArgumentType: " + name + " expects " + std::to_string(params.size()) +
                                           " argument(s), got " + std::to_string(args.size()));
        }
        std::vector<abi::Value> values;
        values.reserve(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
            values.push_back(from_python(args[i], params[i],
                                         "ArgumentType: argument " + std::to_string(i + 1) + " of " + name));
        }
        try {
            return to_python(s.bridge->call_export(name, values));
        } catch (const BridgeError& err) {
            raise_python(err.code() == BridgeErrc::StaleHandle ? stale_error() : host_error(), err.what());
        } catch (const SimError& err) {
            raise_python(host_error(), std::string(to_string(err.code())) + ": " + err.what());
        } catch (const std::exception& err) {
            raise_python(host_error(), err.what());
        }
    });
}

PythonRuntime::PythonRuntime() : state_(std::make_unique<State>()) {}

PythonRuntime::~PythonRuntime() { shutdown(); }

std::size_t PythonRuntime::live_objects() const noexcept { return state_->objects.size(); }

void PythonRuntime::start(const RuntimeConfig& config, GuestBridge& bridge) {
    if (g_active != nullptr && g_active != state_.get()) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure, "another Python guest runtime is already running");
    }
    const auto table = find_registration_table(config.module_path);
    if (!table) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure,
                          "guest SDK not found: no polysim/registration.tsv on guest module path " +
                              joined(config.module_path));
    }
    ensure_interpreter(config.runtime_path);

    State& s = *state_;
    s.table_path = *table;
    s.module_path = config.module_path;
    try {
        py::module_ sys = py::module_::import("sys");
        for (auto key : sys.attr("modules").attr("keys")()) s.modules_before.insert(key.cast<std::string>());
        // drop any SDK left over from an earlier run so this path's copy is used
        for (const auto& name : std::set<std::string>(s.modules_before)) {
            if (name == "polysim" || name.rfind("polysim.", 0) == 0) {
                sys.attr("modules").attr("pop")(name, py::none());
                s.modules_before.erase(name);
            }
        }
        py::list path = sys.attr("path");
        for (auto it = config.module_path.rbegin(); it != config.module_path.rend(); ++it) {
            path.attr("insert")(0, *it);
            s.added_paths.push_back(*it);
        }
        g_active = &s;
        s.bridge = &bridge;
        s.running = true;
        py::module_::import("polysim._stubs");
    } catch (py::error_already_set& e) {
        const std::string detail = format_python_error(e);
        shutdown();
        throw BridgeError(BridgeErrc::RuntimeStartFailure, "cannot import the guest SDK (polysim._stubs): " + detail);
    }
}

abi::RegistrationTable PythonRuntime::registration_table() {
    try {
        return abi::load_table_file(state_->table_path);
    } catch (const abi::TableFormatError& e) {
        throw BridgeError(BridgeErrc::RegistrationMismatch, state_->table_path + ": " + e.what());
    } catch (const std::exception& e) {
        throw BridgeError(BridgeErrc::RuntimeStartFailure, e.what());
    }
}

void PythonRuntime::construct(const std::string& class_name) {
    State& s = *state_;
    if (!s.running) throw BridgeError(BridgeErrc::InvalidState, "Python runtime is not running");
    const auto dot = class_name.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == class_name.size()) {
        throw BridgeError(BridgeErrc::UnknownGuestClass,
                          "guest class '" + class_name + "' must be written module.Class");
    }
    const std::string module_name = class_name.substr(0, dot);
    const std::string cls_name = class_name.substr(dot + 1);

    py::object module;
    try {
        module = py::module_::import(module_name.c_str());
    } catch (py::error_already_set& e) {
        if (e.matches(PyExc_ModuleNotFoundError)) {
            const std::string missing = py::str(e.value().attr("name")).cast<std::string>();
            if (module_name == missing || module_name.rfind(missing + ".", 0) == 0) {
                throw BridgeError(BridgeErrc::UnknownGuestClass, "no guest class '" + class_name + "': module '" +
                                                                     missing + "' not found on guest module path " +
                                                                     joined(s.module_path));
            }
        }
        throw BridgeError(BridgeErrc::GuestConstructorFailure,
                          "importing " + module_name + " failed:\n" + format_python_error(e));
    }
    if (!py::hasattr(module, cls_name.c_str())) {
        throw BridgeError(BridgeErrc::UnknownGuestClass, "no guest class '" + class_name + "': module '" +
                                                             module_name + "' has no attribute '" + cls_name +
                                                             "' (guest module path " + joined(s.module_path) + ")");
    }
    const std::uint64_t first_token = s.next_token;
    try {
        py::object instance = module.attr(cls_name.c_str())();
        for (std::uint64_t t = first_token; t < s.next_token; ++t) {
            auto it = s.objects.find(t);
            if (it != s.objects.end() && it->second.is(instance)) s.class_of[t] = class_name;
        }
    } catch (py::error_already_set& e) {
        throw BridgeError(BridgeErrc::GuestConstructorFailure,
                          class_name + "() raised:\n" + format_python_error(e));
    }
}

void PythonRuntime::invoke(std::uint64_t token, Callback which, std::optional<abi::Handle> msg) {
    State& s = *state_;
    const auto it = s.objects.find(token);
    if (it == s.objects.end()) {
        throw BridgeError(BridgeErrc::StaleHandle, "guest object " + std::to_string(token) + " was released");
    }
    try {
        py::object arg = msg ? py::object(py::int_(msg->value)) : py::object(py::none());
        it->second.attr("_on_host_call")(to_string(which), arg);
    } catch (py::error_already_set& e) {
        throw BridgeError(BridgeErrc::GuestCallbackFailure,
                          s.class_of[token] + "." + to_string(which) + "() raised:\n" + format_python_error(e));
    }
}

void PythonRuntime::release(std::uint64_t token) noexcept {
    if (!Py_IsInitialized()) return;
    state_->objects.erase(token);
    state_->class_of.erase(token);
}

void PythonRuntime::shutdown() noexcept {
    State& s = *state_;
    if (!s.running) return;
    s.running = false;
    try {
        s.objects.clear();
        s.class_of.clear();
        py::module_ sys = py::module_::import("sys");
        py::dict modules = sys.attr("modules");
        // forget guest code and the SDK; library modules the guests pulled in stay loaded
        auto from_guest_path = [&](const py::handle& mod) {
            if (!py::hasattr(mod, "__file__") || mod.attr("__file__").is_none()) return false;
            const std::string file = py::str(mod.attr("__file__")).cast<std::string>();
            for (const auto& dir : s.added_paths) {
                if (file.rfind(dir, 0) == 0) return true;
            }
            return false;
        };
        std::vector<std::string> doomed;
        for (auto item : modules) {
            const std::string name = item.first.cast<std::string>();
            if (s.modules_before.count(name)) continue;
            if (name == "polysim" || name.rfind("polysim.", 0) == 0 || from_guest_path(item.second)) {
                doomed.push_back(name);
            }
        }
        for (const auto& name : doomed) modules.attr("pop")(name, py::none());
        py::list path = sys.attr("path");
        for (const auto& p : s.added_paths) {
            if (path.contains(py::str(p))) path.attr("remove")(p);
        }
        py::module_::import("gc").attr("collect")();
    } catch (...) {
        PyErr_Clear();
    }
    s.added_paths.clear();
    s.modules_before.clear();
    s.bridge = nullptr;
    if (g_active == &s) g_active = nullptr;
}

} // namespace polysim::bridge
