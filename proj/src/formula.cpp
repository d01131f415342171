#include "monoterm/formula.hpp"

#include <stdexcept>

namespace monoterm {

const InterpretedSignature& InterpretedSignature::instance() {
    static const InterpretedSignature sig;
    return sig;
}

std::optional<Symbol> InterpretedSignature::find(const std::string& name, int arity) const {
    for (const Symbol* s : {&zero, &succ, &pred, &plus, &minus})
        if (s->name == name && s->arity == arity) return *s;
    return std::nullopt;
}

std::string to_string(Pred pred) {
    switch (pred) {
        case Pred::Eq: return "=";
        case Pred::Gt: return ">";
        case Pred::Ge: return ">=";
    }
    return "?";
}

bool eval_pred(std::int64_t lhs, Pred pred, std::int64_t rhs) {
    switch (pred) {
        case Pred::Eq: return lhs == rhs;
        case Pred::Gt: return lhs > rhs;
        case Pred::Ge: return lhs >= rhs;
    }
    return false;
}

Formula::Formula(Kind kind, TermPtr lhs, Pred pred, TermPtr rhs, FormulaPtr left,
                 FormulaPtr right)
    : kind_(kind),
      lhs_(std::move(lhs)),
      pred_(pred),
      rhs_(std::move(rhs)),
      left_(std::move(left)),
      right_(std::move(right)) {}

FormulaPtr Formula::top() {
    static const FormulaPtr f(new Formula(Kind::Top, nullptr, Pred::Eq, nullptr, nullptr, nullptr));
    return f;
}

FormulaPtr Formula::bottom() {
    static const FormulaPtr f(
        new Formula(Kind::Bottom, nullptr, Pred::Eq, nullptr, nullptr, nullptr));
    return f;
}

FormulaPtr Formula::atom(TermPtr lhs, Pred pred, TermPtr rhs) {
    if (!lhs || !rhs) throw std::runtime_error("null side in atom");
    return FormulaPtr(
        new Formula(Kind::Atom, std::move(lhs), pred, std::move(rhs), nullptr, nullptr));
}

FormulaPtr Formula::negation(FormulaPtr f) {
    if (!f) throw std::runtime_error("null operand in negation");
    return FormulaPtr(new Formula(Kind::Not, nullptr, Pred::Eq, nullptr, std::move(f), nullptr));
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b) {
    if (!a || !b) throw std::runtime_error("null operand in connective");
    return FormulaPtr(
        new Formula(Kind::And, nullptr, Pred::Eq, nullptr, std::move(a), std::move(b)));
}

FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b) {
    if (!a || !b) throw std::runtime_error("null operand in connective");
    return FormulaPtr(
        new Formula(Kind::Or, nullptr, Pred::Eq, nullptr, std::move(a), std::move(b)));
}

FormulaPtr Formula::implication(FormulaPtr a, FormulaPtr b) {
    if (!a || !b) throw std::runtime_error("null operand in connective");
    return FormulaPtr(
        new Formula(Kind::Implies, nullptr, Pred::Eq, nullptr, std::move(a), std::move(b)));
}

const TermPtr& Formula::lhs() const {
    if (kind_ != Kind::Atom) throw std::runtime_error("lhs on non-atom formula");
    return lhs_;
}

const TermPtr& Formula::rhs() const {
    if (kind_ != Kind::Atom) throw std::runtime_error("rhs on non-atom formula");
    return rhs_;
}

Pred Formula::pred() const {
    if (kind_ != Kind::Atom) throw std::runtime_error("pred on non-atom formula");
    return pred_;
}

const FormulaPtr& Formula::child() const {
    if (kind_ != Kind::Not) throw std::runtime_error("child on non-negation formula");
    return left_;
}

const FormulaPtr& Formula::left() const {
    if (kind_ != Kind::And && kind_ != Kind::Or && kind_ != Kind::Implies)
        throw std::runtime_error("left on non-binary formula");
    return left_;
}

const FormulaPtr& Formula::right() const {
    if (kind_ != Kind::And && kind_ != Kind::Or && kind_ != Kind::Implies)
        throw std::runtime_error("right on non-binary formula");
    return right_;
}

bool equal_formulas(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bottom:
            return true;
        case Formula::Kind::Atom:
            return a->pred() == b->pred() && equal_terms(a->lhs(), b->lhs()) &&
                   equal_terms(a->rhs(), b->rhs());
        case Formula::Kind::Not:
            return equal_formulas(a->child(), b->child());
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            return equal_formulas(a->left(), b->left()) && equal_formulas(a->right(), b->right());
    }
    return false;
}

namespace {

template <typename AtomFn>
void walk_atoms(const FormulaPtr& f, AtomFn&& on_atom) {
    switch (f->kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bottom:
            return;
        case Formula::Kind::Atom:
            on_atom(*f);
            return;
        case Formula::Kind::Not:
            walk_atoms(f->child(), on_atom);
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            walk_atoms(f->left(), on_atom);
            walk_atoms(f->right(), on_atom);
            return;
    }
}

}  // namespace

std::set<std::string> vars_of(const FormulaPtr& f) {
    std::set<std::string> out;
    walk_atoms(f, [&](const Formula& atom) {
        for (auto&& side : {atom.lhs(), atom.rhs()})
            for (auto&& x : vars_of(side)) out.insert(x);
    });
    return out;
}

bool is_interpreted_formula(const FormulaPtr& f) {
    bool ok = true;
    walk_atoms(f, [&](const Formula& atom) {
        ok = ok && is_interpreted_term(atom.lhs()) && is_interpreted_term(atom.rhs());
    });
    return ok;
}

FormulaPtr substitute(const FormulaPtr& f, const Substitution& sigma) {
    switch (f->kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bottom:
            return f;
        case Formula::Kind::Atom:
            return Formula::atom(apply_substitution(f->lhs(), sigma), f->pred(),
                                 apply_substitution(f->rhs(), sigma));
        case Formula::Kind::Not:
            return Formula::negation(substitute(f->child(), sigma));
        case Formula::Kind::And:
            return Formula::conjunction(substitute(f->left(), sigma),
                                        substitute(f->right(), sigma));
        case Formula::Kind::Or:
            return Formula::disjunction(substitute(f->left(), sigma),
                                        substitute(f->right(), sigma));
        case Formula::Kind::Implies:
            return Formula::implication(substitute(f->left(), sigma),
                                        substitute(f->right(), sigma));
    }
    return f;
}

std::int64_t eval_term(const TermPtr& t, const IntEnv& env) {
    switch (t->kind()) {
        case Term::Kind::Variable: {
            auto it = env.find(t->var_name());
            if (it == env.end())
                throw std::runtime_error("unbound variable '" + t->var_name() +
                                         "' in evaluation");
            return it->second;
        }
        case Term::Kind::Literal:
            return t->lit_value();
        case Term::Kind::Application:
            break;
    }
    const Symbol& sym = t->symbol();
    if (sym.kind != SymbolKind::Interpreted)
        throw std::runtime_error("uninterpreted symbol '" + sym.name + "' in evaluation");
    if (sym.name == "0") return 0;
    if (sym.name == "s") return eval_term(t->args()[0], env) + 1;
    if (sym.name == "p") return eval_term(t->args()[0], env) - 1;
    if (sym.name == "+") return eval_term(t->args()[0], env) + eval_term(t->args()[1], env);
    if (sym.name == "-") return eval_term(t->args()[0], env) - eval_term(t->args()[1], env);
    throw std::runtime_error("unknown interpreted symbol '" + sym.name + "'");
}

std::int64_t eval_ground_term(const TermPtr& t) {
    return eval_term(t, {});
}

bool eval_formula(const FormulaPtr& f, const IntEnv& env) {
    switch (f->kind()) {
        case Formula::Kind::Top:
            return true;
        case Formula::Kind::Bottom:
            return false;
        case Formula::Kind::Atom:
            return eval_pred(eval_term(f->lhs(), env), f->pred(), eval_term(f->rhs(), env));
        case Formula::Kind::Not:
            return !eval_formula(f->child(), env);
        case Formula::Kind::And:
            return eval_formula(f->left(), env) && eval_formula(f->right(), env);
        case Formula::Kind::Or:
            return eval_formula(f->left(), env) || eval_formula(f->right(), env);
        case Formula::Kind::Implies:
            return !eval_formula(f->left(), env) || eval_formula(f->right(), env);
    }
    return false;
}

bool eval_ground_formula(const FormulaPtr& f) {
    return eval_formula(f, {});
}

namespace {

// Binding strength: => < \/ < /\ < !; a child is parenthesized when it binds
// weaker than its context.
int rank(Formula::Kind kind) {
    switch (kind) {
        case Formula::Kind::Implies: return 1;
        case Formula::Kind::Or: return 2;
        case Formula::Kind::And: return 3;
        default: return 4;
    }
}

void render(const FormulaPtr& f, int context, std::string& out) {
    int own = rank(f->kind());
    switch (f->kind()) {
        case Formula::Kind::Top:
            out += "true";
            return;
        case Formula::Kind::Bottom:
            out += "false";
            return;
        case Formula::Kind::Atom:
            out += to_string(f->lhs()) + " " + to_string(f->pred()) + " " + to_string(f->rhs());
            return;
        case Formula::Kind::Not: {
            out += '!';
            bool parens = f->child()->kind() != Formula::Kind::Top &&
                          f->child()->kind() != Formula::Kind::Bottom;
            if (parens) out += '(';
            render(f->child(), own, out);
            if (parens) out += ')';
            return;
        }
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies: {
            bool parens = own < context;
            const char* op = f->kind() == Formula::Kind::And   ? " /\\ "
                             : f->kind() == Formula::Kind::Or  ? " \\/ "
                                                               : " => ";
            if (parens) out += '(';
            // => is rendered right-associatively, /\ and \/ associate freely
            int left_ctx = f->kind() == Formula::Kind::Implies ? own + 1 : own;
            render(f->left(), left_ctx, out);
            out += op;
            render(f->right(), own, out);
            if (parens) out += ')';
            return;
        }
    }
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
    std::string out;
    render(f, 0, out);
    return out;
}

}  // namespace monoterm
