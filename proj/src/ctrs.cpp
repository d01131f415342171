#include "monoterm/ctrs.hpp"

#include <algorithm>
#include <stdexcept>

namespace monoterm {

namespace {

bool term_has_marked(const TermPtr& t) { return contains_marked(t); }

std::set<std::string> constraint_vars(const ConstrainedRule& rule) {
    return rule.constraint ? vars_of(rule.constraint) : std::set<std::string>{};
}

std::optional<std::pair<int, TermPtr>> contract_here(const ConstrainedTRS& trs,
                                                     const TermPtr& sub) {
    for (const auto& rule : trs.rules) {
        auto sigma = match_term(rule.lhs, sub);
        if (!sigma) continue;
        if (!substitution_interpreted_on(*sigma, constraint_vars(rule))) continue;
        auto instance = substitute(rule.constraint, *sigma);
        if (!vars_of(instance).empty()) continue;
        if (!eval_ground_formula(instance)) continue;
        return std::make_pair(rule.id, apply_substitution(rule.rhs, *sigma));
    }
    return std::nullopt;
}

std::optional<RewriteStep> first_step_below(const ConstrainedTRS& trs, const TermPtr& sub,
                                            Position& prefix) {
    if (!sub->is_app()) return std::nullopt;
    if (auto hit = contract_here(trs, sub)) return RewriteStep{prefix, hit->first, hit->second};
    const auto& args = sub->args();
    for (std::size_t i = 0; i < args.size(); ++i) {
        prefix.push_back(static_cast<int>(i) + 1);
        auto inner = first_step_below(trs, args[i], prefix);
        prefix.pop_back();
        if (!inner) continue;
        auto patched = args;
        patched[i] = inner->result;
        inner->result = Term::app(sub->symbol(), std::move(patched));
        return inner;
    }
    return std::nullopt;
}

}  // namespace

void check_rule_wellformed(const ConstrainedRule& rule) {
    if (!rule.lhs || !rule.rhs || !rule.constraint)
        throw std::runtime_error("rule " + std::to_string(rule.id) + " is incomplete");
    if (!rule.lhs->is_app())
        throw std::runtime_error("rule " + std::to_string(rule.id) +
                                 ": left-hand side must be an application");
    if (term_has_marked(rule.lhs) || term_has_marked(rule.rhs))
        throw std::runtime_error("rule " + std::to_string(rule.id) +
                                 ": marked symbols cannot occur in rules");
    auto lhs_vars = vars_of(rule.lhs);
    for (const auto& x : vars_of(rule.rhs))
        if (!lhs_vars.count(x))
            throw std::runtime_error("rule " + std::to_string(rule.id) + ": variable '" + x +
                                     "' of the right-hand side is not bound on the left");
    for (const auto& x : constraint_vars(rule))
        if (!lhs_vars.count(x))
            throw std::runtime_error("rule " + std::to_string(rule.id) + ": variable '" + x +
                                     "' of the constraint is not bound on the left");
    if (!is_interpreted_formula(rule.constraint))
        throw std::runtime_error("rule " + std::to_string(rule.id) +
                                 ": constraint must be built from interpreted terms");
}

std::set<Symbol> ConstrainedTRS::defined_symbols() const {
    std::set<Symbol> out;
    for (const auto& rule : rules)
        if (rule.lhs && rule.lhs->is_app()) out.insert(rule.lhs->symbol());
    return out;
}

SoundnessReport check_local_soundness(const ConstrainedTRS& trs, ValidityOracle& oracle) {
    SoundnessReport report;
    bool failed = false, unverified = false;
    for (const auto& rule : trs.rules) {
        if (rule.lhs->symbol().kind != SymbolKind::Interpreted) continue;
        std::string prefix = "rule " + std::to_string(rule.id) + " (" + to_string(rule) + ")";
        bool structural_ok = true;
        if (!is_interpreted_term(rule.rhs)) {
            report.issues.push_back(prefix + ": right-hand side leaves T(G, V)");
            failed = true;
            structural_ok = false;
        }
        for (const auto& arg : rule.lhs->args()) {
            if (!is_interpreted_term(arg)) {
                report.issues.push_back(prefix + ": left argument leaves T(G, V)");
                failed = true;
                structural_ok = false;
                break;
            }
        }
        if (!structural_ok) continue;
        auto equivalence = Formula::implication(
            rule.constraint, Formula::atom(rule.lhs, Pred::Eq, rule.rhs));
        switch (oracle.is_valid(equivalence)) {
            case Truth::Yes:
                break;
            case Truth::No:
                report.issues.push_back(prefix + ": sides are not equal under the constraint");
                failed = true;
                break;
            case Truth::Undetermined:
                report.issues.push_back(prefix + ": equivalence could not be decided");
                unverified = true;
                break;
        }
    }
    report.status = failed        ? SoundnessStatus::Failed
                    : unverified ? SoundnessStatus::Unverified
                                 : SoundnessStatus::Ok;
    return report;
}

std::vector<RewriteStep> rewrite_steps(const ConstrainedTRS& trs, const TermPtr& t) {
    std::vector<RewriteStep> steps;
    for (const auto& pos : positions(t)) {
        TermPtr sub = subterm_at(t, pos);
        if (!sub->is_app()) continue;
        for (const auto& rule : trs.rules) {
            auto sigma = match_term(rule.lhs, sub);
            if (!sigma) continue;
            if (!substitution_interpreted_on(*sigma, constraint_vars(rule))) continue;
            auto instance = substitute(rule.constraint, *sigma);
            if (!vars_of(instance).empty()) continue;
            if (!eval_ground_formula(instance)) continue;
            steps.push_back(
                {pos, rule.id, replace_at(t, pos, apply_substitution(rule.rhs, *sigma))});
        }
    }
    return steps;
}

std::optional<RewriteStep> first_rewrite_step(const ConstrainedTRS& trs, const TermPtr& t) {
    Position prefix;
    return first_step_below(trs, t, prefix);
}

NormalizeResult normalize(const ConstrainedTRS& trs, TermPtr t, int max_steps) {
    NormalizeResult result;
    result.term = std::move(t);
    while (result.steps < max_steps) {
        auto step = first_rewrite_step(trs, result.term);
        if (!step) return result;
        result.term = step->result;
        result.path.push_back(std::move(*step));
        ++result.steps;
    }
    result.budget_exhausted = first_rewrite_step(trs, result.term).has_value();
    return result;
}

TermPtr mark_root(const TermPtr& t) {
    if (!t->is_app()) throw std::runtime_error("cannot mark a non-application term");
    return Term::app(make_marked(t->symbol()), t->args());
}

std::vector<DependencyPair> compute_dependency_pairs(const ConstrainedTRS& trs) {
    auto defined = trs.defined_symbols();
    std::vector<DependencyPair> pairs;
    for (const auto& rule : trs.rules) {
        TermPtr lhs = mark_root(rule.lhs);
        for (const auto& pos : positions(rule.rhs)) {
            TermPtr sub = subterm_at(rule.rhs, pos);
            if (!sub->is_app() || !defined.count(sub->symbol())) continue;
            TermPtr rhs = mark_root(sub);
            bool duplicate = false;
            for (const auto& seen : pairs) {
                if (equal_terms(seen.lhs, lhs) && equal_terms(seen.rhs, rhs) &&
                    equal_formulas(seen.constraint, rule.constraint)) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            pairs.push_back({static_cast<int>(pairs.size()) + 1, lhs, rhs, rule.constraint,
                             rule.id, pos});
        }
    }
    return pairs;
}

DependencyPair rename_apart(const DependencyPair& pair, int index) {
    Substitution renaming;
    for (const auto& x : vars_of(pair.lhs))
        renaming.emplace(x, Term::var(x + "_" + std::to_string(index)));
    DependencyPair out = pair;
    out.lhs = apply_substitution(pair.lhs, renaming);
    out.rhs = apply_substitution(pair.rhs, renaming);
    out.constraint = substitute(pair.constraint, renaming);
    return out;
}

std::string to_string(const ConstrainedRule& rule) {
    std::string out = to_string(rule.lhs) + " -> " + to_string(rule.rhs);
    if (rule.constraint->kind() != Formula::Kind::Top)
        out += " [ " + to_string(rule.constraint) + " ]";
    return out;
}

std::string to_string(const DependencyPair& pair) {
    std::string out = to_string(pair.lhs) + " -> " + to_string(pair.rhs);
    if (pair.constraint->kind() != Formula::Kind::Top)
        out += " [ " + to_string(pair.constraint) + " ]";
    return out;
}

}  // namespace monoterm
