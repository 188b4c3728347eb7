#pragma once

#include "polysim/topology/ast.hpp"

#include <string>
#include <string_view>

namespace polysim::topo {

/// Parses topology text. Purely syntactic: names are only checked for
/// duplicates inside one declaration and across declarations of this text.
/// Throws TopologyError (SyntaxError, DuplicateName, UnknownUnit).
TopologyAst parse_topology(std::string_view text, std::string origin = {});

/// Reads and parses a file; I/O failures are reported as SyntaxError.
TopologyAst parse_topology_file(const std::string& path);

struct PrintStyle {
    /// One declaration per line, no indentation.
    bool compact = false;
    int indent = 4;
};

/// Canonical text for an AST; parse_topology(print_topology(a)) == a.
std::string print_topology(const TopologyAst& ast, const PrintStyle& style = {});

/// Parses one literal as it may appear after `=` (string, bool, number, time).
ParamValue parse_literal(std::string_view text);

/// Literal forms shared with the printer.
std::string datarate_literal(std::int64_t bits_per_second);
std::string quote_string(std::string_view s);

} // namespace polysim::topo
