#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace monoterm {

/// Symbols are split into two disjoint groups: interpreted symbols carry
/// fixed integer semantics (0, s, p, +, -), uninterpreted symbols are free
/// constructors/defined symbols of the rewrite system.  Marked symbols are
/// uninterpreted symbols whose name carries a trailing '#'; they never occur
/// in input systems and are introduced only when dependency pairs are built.
enum class SymbolKind { Uninterpreted, Interpreted };

struct Symbol {
    std::string name;
    int arity = 0;
    SymbolKind kind = SymbolKind::Uninterpreted;

    bool is_marked() const;

    bool operator==(const Symbol& other) const;
    bool operator!=(const Symbol& other) const { return !(*this == other); }
    bool operator<(const Symbol& other) const;
};

/// Returns the marked version of an (unmarked, uninterpreted) symbol.
Symbol make_marked(const Symbol& s);

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// A position is a sequence of 1-based argument indices; the empty position
/// addresses the root.
using Position = std::vector<int>;

/// Immutable first-order terms.  Integer literals are first-class leaves so
/// that ground interpreted data does not have to be spelled as s/p towers.
class Term {
public:
    enum class Kind { Variable, Literal, Application };

    static TermPtr var(std::string name);
    static TermPtr lit(std::int64_t value);
    static TermPtr app(Symbol symbol, std::vector<TermPtr> args);

    Kind kind() const { return kind_; }
    bool is_var() const { return kind_ == Kind::Variable; }
    bool is_lit() const { return kind_ == Kind::Literal; }
    bool is_app() const { return kind_ == Kind::Application; }

    /// Valid only for the corresponding kind; misuse throws.
    const std::string& var_name() const;
    std::int64_t lit_value() const;
    const Symbol& symbol() const;
    const std::vector<TermPtr>& args() const;

private:
    Term(Kind kind, std::string var_name, std::int64_t value, Symbol symbol,
         std::vector<TermPtr> args);

    Kind kind_;
    std::string var_name_;
    std::int64_t value_ = 0;
    Symbol symbol_;
    std::vector<TermPtr> args_;
};

bool equal_terms(const TermPtr& a, const TermPtr& b);

/// All positions of t in pre-order (root first, arguments left to right).
std::vector<Position> positions(const TermPtr& t);

/// Subterm of t at position p; throws on an invalid position.
TermPtr subterm_at(const TermPtr& t, const Position& p);

/// Replaces the subterm of t at position p by s; throws on an invalid
/// position.  replace_at(t, p, subterm_at(t, p)) reproduces t.
TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& s);

using Substitution = std::map<std::string, TermPtr>;

TermPtr apply_substitution(const TermPtr& t, const Substitution& sigma);

/// Syntactic matching: finds sigma with apply_substitution(pattern, sigma)
/// equal to subject, treating variables of the pattern as match variables.
/// Non-linear patterns require consistent bindings.
std::optional<Substitution> match_term(const TermPtr& pattern, const TermPtr& subject);

/// compose(first, second) maps x to second(first(x)); applying the result is
/// the same as applying first and then second.
Substitution compose(const Substitution& first, const Substitution& second);

std::set<std::string> vars_of(const TermPtr& t);
bool is_ground(const TermPtr& t);

/// Membership in T(G, V): every application symbol is interpreted.
bool is_interpreted_term(const TermPtr& t);

/// Membership in T(G, allowed): interpreted symbols only, and every variable
/// drawn from the allowed set.
bool is_interpreted_term_over(const TermPtr& t, const std::set<std::string>& allowed);

/// Membership in T(G): interpreted symbols only and no variables.
bool is_interpreted_ground(const TermPtr& t);

bool contains_marked(const TermPtr& t);

/// A substitution is interpreted on the given variables when each of them is
/// mapped into T(G, V).  Unmapped variables count as mapped to themselves.
bool substitution_interpreted_on(const Substitution& sigma,
                                 const std::set<std::string>& vars);

/// Rendering uses s^N/p^N sugar for chains of length at least two and infix
/// notation for + and -.
std::string to_string(const TermPtr& t);

}  // namespace monoterm
