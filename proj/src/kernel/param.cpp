#include "polysim/kernel/param.hpp"

#include "polysim/kernel/errors.hpp"

#include <charconv>

namespace polysim {

const char* to_string(ParamType type) noexcept {
    switch (type) {
    case ParamType::Int: return "int";
    case ParamType::Double: return "double";
    case ParamType::String: return "string";
    case ParamType::Bool: return "bool";
    case ParamType::Time: return "time";
    }
    return "?";
}

ParamType ParamValue::type() const noexcept {
    switch (value_.index()) {
    case 0: return ParamType::Int;
    case 1: return ParamType::Double;
    case 2: return ParamType::String;
    case 3: return ParamType::Bool;
    default: return ParamType::Time;
    }
}

namespace {
[[noreturn]] void mismatch(ParamType want, ParamType have) {
    throw SimError(SimErrc::ParameterType,
                   std::string("parameter is ") + to_string(have) + ", not " + to_string(want));
}
} // namespace

std::int64_t ParamValue::as_int() const {
    if (const auto* v = std::get_if<std::int64_t>(&value_)) return *v;
    mismatch(ParamType::Int, type());
}

double ParamValue::as_double() const {
    if (const auto* v = std::get_if<double>(&value_)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*v);
    mismatch(ParamType::Double, type());
}

const std::string& ParamValue::as_string() const {
    if (const auto* v = std::get_if<std::string>(&value_)) return *v;
    mismatch(ParamType::String, type());
}

bool ParamValue::as_bool() const {
    if (const auto* v = std::get_if<bool>(&value_)) return *v;
    mismatch(ParamType::Bool, type());
}

SimTime ParamValue::as_time() const {
    if (const auto* v = std::get_if<SimTime>(&value_)) return *v;
    mismatch(ParamType::Time, type());
}

std::string ParamValue::literal() const {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const {
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
            std::string s(buf, end);
            // keep the double-ness visible so the literal reparses as a double
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            return s;
        }
        std::string operator()(const std::string& v) const {
            std::string out = "\"";
            for (char c : v) {
                if (c == '"' || c == '\\') out.push_back('\\');
                if (c == '\n') {
                    out += "\\n";
                    continue;
                }
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(SimTime v) const { return v.str_with_unit(); }
    };
    return std::visit(Visitor{}, value_);
}

} // namespace polysim
