#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "monoterm/formula.hpp"
#include "monoterm/term.hpp"
#include "monoterm/validity.hpp"

namespace monoterm {

struct ConstrainedRule {
    int id = 0;
    TermPtr lhs;
    TermPtr rhs;
    FormulaPtr constraint;
};

/// Throws when the rule breaks a well-formedness invariant: the left-hand
/// side must be an application, it must cover the variables of the right-hand
/// side and the constraint, the constraint must be interpreted, and marked
/// symbols must not occur.
void check_rule_wellformed(const ConstrainedRule& rule);

struct ConstrainedTRS {
    std::vector<ConstrainedRule> rules;
    std::vector<Symbol> signature;

    /// Roots of left-hand sides.  Interpreted symbols can be defined too
    /// (the s/p collapse rules make s and p defined).
    std::set<Symbol> defined_symbols() const;
};

enum class SoundnessStatus { Ok, Failed, Unverified };

/// Local soundness of rules rooted in an interpreted symbol: the right-hand
/// side and the proper subterms of the left-hand side must be interpreted
/// terms, and the constraint must force both sides equal.  Unverified means
/// some equivalence came back undetermined; such a system should be loaded
/// only on explicit request.
struct SoundnessReport {
    SoundnessStatus status = SoundnessStatus::Ok;
    std::vector<std::string> issues;
};

SoundnessReport check_local_soundness(const ConstrainedTRS& trs, ValidityOracle& oracle);

struct RewriteStep {
    Position position;
    int rule_id = 0;
    TermPtr result;
};

/// All single rewrite steps from t, ordered by position (pre-order) and then
/// rule.  A step at position p with rule l -> r [phi] exists when l matches
/// t|_p, the matcher maps the constraint's variables to interpreted terms,
/// and the instantiated constraint is ground and evaluates to true.
std::vector<RewriteStep> rewrite_steps(const ConstrainedTRS& trs, const TermPtr& t);

/// First step in the order of rewrite_steps, computed without enumerating
/// the rest.  Reduction sequences on deep terms must use this; the full
/// enumeration walks every position and gets expensive.
std::optional<RewriteStep> first_rewrite_step(const ConstrainedTRS& trs, const TermPtr& t);

struct NormalizeResult {
    TermPtr term;
    int steps = 0;
    bool budget_exhausted = false;
    std::vector<RewriteStep> path;
};

/// Deterministic reduction taking the first available step until no step
/// applies or the budget runs out.
NormalizeResult normalize(const ConstrainedTRS& trs, TermPtr t, int max_steps = 10000);

struct DependencyPair {
    int id = 0;
    TermPtr lhs;
    TermPtr rhs;
    FormulaPtr constraint;
    int origin_rule = 0;
    Position origin_position;
};

/// Marks a defined-rooted term at the root.
TermPtr mark_root(const TermPtr& t);

/// One pair l# -> u# [phi] per defined-rooted subterm u of each right-hand
/// side, enumerated in rule order and pre-order position order.  Duplicates
/// (same sides and constraint) keep their first occurrence; ids are 1-based
/// over the deduplicated sequence.
std::vector<DependencyPair> compute_dependency_pairs(const ConstrainedTRS& trs);

/// Renames every variable of the pair by appending an index suffix, keeping
/// chains variable-disjoint.
DependencyPair rename_apart(const DependencyPair& pair, int index);

std::string to_string(const ConstrainedRule& rule);
std::string to_string(const DependencyPair& pair);

}  // namespace monoterm
