#include "monoterm/validity.hpp"

namespace monoterm {

namespace {

bool is_top(const FormulaPtr& f) { return f->kind() == Formula::Kind::Top; }
bool is_bottom(const FormulaPtr& f) { return f->kind() == Formula::Kind::Bottom; }

}  // namespace

FormulaPtr simplify_formula(const FormulaPtr& phi) {
    switch (phi->kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bottom:
            return phi;
        case Formula::Kind::Atom: {
            LinearPoly diff = linearize(phi->lhs()) - linearize(phi->rhs());
            if (!diff.vars().empty()) return phi;
            std::int64_t c = diff.constant_part().constant_value();
            return eval_pred(c, phi->pred(), 0) ? Formula::top() : Formula::bottom();
        }
        case Formula::Kind::Not: {
            auto inner = simplify_formula(phi->child());
            if (is_top(inner)) return Formula::bottom();
            if (is_bottom(inner)) return Formula::top();
            return inner == phi->child() ? phi : Formula::negation(inner);
        }
        case Formula::Kind::And: {
            auto a = simplify_formula(phi->left());
            auto b = simplify_formula(phi->right());
            if (is_bottom(a) || is_bottom(b)) return Formula::bottom();
            if (is_top(a)) return b;
            if (is_top(b)) return a;
            return a == phi->left() && b == phi->right() ? phi : Formula::conjunction(a, b);
        }
        case Formula::Kind::Or: {
            auto a = simplify_formula(phi->left());
            auto b = simplify_formula(phi->right());
            if (is_top(a) || is_top(b)) return Formula::top();
            if (is_bottom(a)) return b;
            if (is_bottom(b)) return a;
            return a == phi->left() && b == phi->right() ? phi : Formula::disjunction(a, b);
        }
        case Formula::Kind::Implies: {
            auto a = simplify_formula(phi->left());
            auto b = simplify_formula(phi->right());
            if (is_bottom(a) || is_top(b)) return Formula::top();
            if (is_top(a)) return b;
            if (is_bottom(b)) return simplify_formula(Formula::negation(a));
            return a == phi->left() && b == phi->right() ? phi : Formula::implication(a, b);
        }
    }
    return phi;
}

smt::ExprPtr to_expr(const CoefExpr& coef) {
    std::vector<smt::ExprPtr> terms;
    for (const auto& [mono, c] : coef.terms()) {
        if (mono.empty()) {
            terms.push_back(smt::int_const(c));
            continue;
        }
        std::vector<smt::ExprPtr> factors;
        if (c != 1) factors.push_back(smt::int_const(c));
        for (const auto& name : mono) factors.push_back(smt::sym(name));
        terms.push_back(smt::mul(std::move(factors)));
    }
    return smt::add(std::move(terms));
}

smt::ExprPtr to_expr(const LinearPoly& poly) {
    std::vector<smt::ExprPtr> terms;
    if (!poly.constant_part().is_zero()) terms.push_back(to_expr(poly.constant_part()));
    for (const auto& [var, coef] : poly.coefficients()) {
        if (coef.is_constant() && coef.constant_value() == 1) {
            terms.push_back(smt::sym(var));
            continue;
        }
        terms.push_back(smt::mul({to_expr(coef), smt::sym(var)}));
    }
    return smt::add(std::move(terms));
}

smt::ExprPtr to_expr(const FormulaPtr& phi) {
    switch (phi->kind()) {
        case Formula::Kind::Top:
            return smt::bool_const(true);
        case Formula::Kind::Bottom:
            return smt::bool_const(false);
        case Formula::Kind::Atom: {
            auto lhs = to_expr(linearize(phi->lhs()));
            auto rhs = to_expr(linearize(phi->rhs()));
            switch (phi->pred()) {
                case Pred::Eq: return smt::eq(lhs, rhs);
                case Pred::Gt: return smt::gt(lhs, rhs);
                case Pred::Ge: return smt::ge(lhs, rhs);
            }
            return smt::bool_const(false);
        }
        case Formula::Kind::Not:
            return smt::logical_not(to_expr(phi->child()));
        case Formula::Kind::And:
            return smt::logical_and({to_expr(phi->left()), to_expr(phi->right())});
        case Formula::Kind::Or:
            return smt::logical_or({to_expr(phi->left()), to_expr(phi->right())});
        case Formula::Kind::Implies:
            return smt::implies(to_expr(phi->left()), to_expr(phi->right()));
    }
    return smt::bool_const(false);
}

ValidityOracle::ValidityOracle(smt::SolverConfig config) : config_(std::move(config)) {}

Truth ValidityOracle::solve_satisfiable(const FormulaPtr& phi) {
    std::string key = to_string(phi);
    auto cached = sat_cache_.find(key);
    if (cached != sat_cache_.end()) return cached->second;

    smt::ConstraintSystem cs;
    cs.logic = "QF_LIA";
    for (const auto& x : vars_of(phi)) cs.int_unknowns.push_back(x);
    cs.assertions = {to_expr(phi)};
    cs.want_model = false;

    ++solver_calls_;
    auto verdict = smt::check(cs, config_, "validity_" + std::to_string(++query_counter_));
    Truth truth = verdict.status == smt::Status::Sat     ? Truth::Yes
                  : verdict.status == smt::Status::Unsat ? Truth::No
                                                         : Truth::Undetermined;
    if (truth != Truth::Undetermined) sat_cache_.emplace(std::move(key), truth);
    return truth;
}

Truth ValidityOracle::is_satisfiable(const FormulaPtr& phi) {
    auto reduced = simplify_formula(phi);
    if (reduced->kind() == Formula::Kind::Top) return Truth::Yes;
    if (reduced->kind() == Formula::Kind::Bottom) return Truth::No;
    return solve_satisfiable(reduced);
}

Truth ValidityOracle::is_valid(const FormulaPtr& phi) {
    auto reduced = simplify_formula(phi);
    if (reduced->kind() == Formula::Kind::Top) return Truth::Yes;
    if (reduced->kind() == Formula::Kind::Bottom) return Truth::No;
    Truth negated = solve_satisfiable(simplify_formula(Formula::negation(reduced)));
    if (negated == Truth::Yes) return Truth::No;
    if (negated == Truth::No) return Truth::Yes;
    return Truth::Undetermined;
}

}  // namespace monoterm
