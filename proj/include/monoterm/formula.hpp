#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "monoterm/term.hpp"

namespace monoterm {

/// The fixed interpreted signature over the integers: the constant 0,
/// successor s, predecessor p, binary + and -, plus first-class literals.
struct InterpretedSignature {
    Symbol zero{"0", 0, SymbolKind::Interpreted};
    Symbol succ{"s", 1, SymbolKind::Interpreted};
    Symbol pred{"p", 1, SymbolKind::Interpreted};
    Symbol plus{"+", 2, SymbolKind::Interpreted};
    Symbol minus{"-", 2, SymbolKind::Interpreted};

    static const InterpretedSignature& instance();
    std::optional<Symbol> find(const std::string& name, int arity) const;
};

/// Predicates are normalized at construction time: < and <= are expressed by
/// swapping sides, disequality by negation.
enum class Pred { Eq, Gt, Ge };

std::string to_string(Pred pred);
bool eval_pred(std::int64_t lhs, Pred pred, std::int64_t rhs);

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Quantifier-free constraints over interpreted terms.  Connectives are
/// binary; the parser folds chains left-associatively.
class Formula {
public:
    enum class Kind { Top, Bottom, Atom, Not, And, Or, Implies };

    static FormulaPtr top();
    static FormulaPtr bottom();
    static FormulaPtr atom(TermPtr lhs, Pred pred, TermPtr rhs);
    static FormulaPtr negation(FormulaPtr f);
    static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr implication(FormulaPtr a, FormulaPtr b);

    Kind kind() const { return kind_; }

    const TermPtr& lhs() const;
    const TermPtr& rhs() const;
    Pred pred() const;

    /// Child accessors: child() for Not, left()/right() for binary kinds.
    const FormulaPtr& child() const;
    const FormulaPtr& left() const;
    const FormulaPtr& right() const;

private:
    Formula(Kind kind, TermPtr lhs, Pred pred, TermPtr rhs, FormulaPtr left, FormulaPtr right);

    Kind kind_;
    TermPtr lhs_;
    Pred pred_ = Pred::Eq;
    TermPtr rhs_;
    FormulaPtr left_;
    FormulaPtr right_;
};

bool equal_formulas(const FormulaPtr& a, const FormulaPtr& b);

std::set<std::string> vars_of(const FormulaPtr& f);

/// True when every atom compares terms of T(G, V); constraints of rules must
/// satisfy this.
bool is_interpreted_formula(const FormulaPtr& f);

FormulaPtr substitute(const FormulaPtr& f, const Substitution& sigma);

using IntEnv = std::map<std::string, std::int64_t>;

/// Evaluation under the fixed integer semantics.  Throws on variables
/// without a binding and on uninterpreted symbols.
std::int64_t eval_term(const TermPtr& t, const IntEnv& env);
std::int64_t eval_ground_term(const TermPtr& t);
bool eval_formula(const FormulaPtr& f, const IntEnv& env);
bool eval_ground_formula(const FormulaPtr& f);

std::string to_string(const FormulaPtr& f);

}  // namespace monoterm
