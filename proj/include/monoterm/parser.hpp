#pragma once

#include <optional>
#include <string>
#include <vector>

#include "monoterm/ctrs.hpp"

namespace monoterm {

struct SourceLocation {
    int line = 0;
    int column = 0;
};

struct Diagnostic {
    SourceLocation location;
    std::string message;
};

/// A parsed system.  The declared uninterpreted symbols live in
/// trs.signature in declaration order, rules carry 1-based ids in file
/// order, and rule_locations[i] names the line of rules[i].
struct CtrsDocument {
    ConstrainedTRS trs;
    std::vector<SourceLocation> rule_locations;
};

struct ParseResult {
    std::optional<CtrsDocument> document;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

/// Grammar, one statement per line:
///
///   SIG f/1 g/2          declares uninterpreted symbols
///   lhs -> rhs [ phi ]   rule; omitting the bracket means true
///   ; comment            runs to the end of the line
///
/// Terms are variables, integer literals, declared symbols, the interpreted
/// 0/s/p with infix + and -, and the s^N(t) / p^N(t) towers.  Constraints
/// use the predicates = > >= < <= (the last two normalize to the flipped
/// comparison) and the connectives ! /\ \/ => with the usual precedence.
/// Marked symbols are not part of the input language.
ParseResult parse_ctrs_text(const std::string& text);

/// Reads and parses a file; an unreadable path becomes a diagnostic.
ParseResult parse_ctrs_file(const std::string& path);

/// Canonical source form; parse_ctrs_text(print_ctrs(doc)) reproduces doc.
std::string print_ctrs(const CtrsDocument& doc);

std::string to_string(const Diagnostic& diagnostic);

}  // namespace monoterm
