#include "monoterm/polyinterp.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace monoterm {

namespace {

constexpr const char* kBoundName = "c0";

/// Coefficients this large cannot be spelled as repeated addition when the
/// verifier turns polynomials back into terms.
constexpr std::int64_t kVerifiableCoefficient = 64;

std::string join_ints(const std::vector<int>& ids) {
    std::string out = "{";
    bool first = true;
    for (int id : ids) {
        if (!first) out += ", ";
        out += std::to_string(id);
        first = false;
    }
    return out + "}";
}

struct TemplateDomain {
    std::vector<Symbol> symbols;
    std::vector<Symbol> plain;
    std::map<Symbol, std::string> base;
};

std::string coefficient_name(const TemplateDomain& domain, const Symbol& symbol, int index) {
    return "k_" + domain.base.at(symbol) + "_" + std::to_string(index);
}

TemplateDomain template_domain(const ConstrainedTRS& trs, PiKind kind) {
    TemplateDomain domain;
    for (const auto& defined : trs.defined_symbols()) domain.symbols.push_back(make_marked(defined));
    if (kind != PiKind::Legacy) {
        std::set<Symbol> plain(trs.signature.begin(), trs.signature.end());
        for (const auto& rule : trs.rules) {
            for (const TermPtr& side : {rule.lhs, rule.rhs}) {
                for (const auto& pos : positions(side)) {
                    TermPtr sub = subterm_at(side, pos);
                    if (sub->is_app() && sub->symbol().kind == SymbolKind::Uninterpreted &&
                        !sub->symbol().is_marked())
                        plain.insert(sub->symbol());
                }
            }
        }
        domain.plain.assign(plain.begin(), plain.end());
        domain.symbols.insert(domain.symbols.end(), domain.plain.begin(), domain.plain.end());
    }
    std::set<std::string> taken;
    for (const auto& symbol : domain.symbols) {
        std::string base = symbol.name;
        auto hash = base.find('#');
        if (hash != std::string::npos) base = base.substr(0, hash) + "_m";
        while (taken.count(base)) base += "_";
        taken.insert(base);
        domain.base.emplace(symbol, base);
    }
    return domain;
}

LinearPoly rename_poly(const LinearPoly& poly) {
    LinearPoly out = LinearPoly::constant(poly.constant_part());
    for (const auto& [var, coef] : poly.coefficients())
        out = out + LinearPoly::variable("v_" + var).scaled(coef);
    return out;
}

FormulaPtr rename_formula(const FormulaPtr& phi) {
    Substitution sigma;
    for (const auto& var : vars_of(phi)) sigma[var] = Term::var("v_" + var);
    return substitute(phi, sigma);
}

enum class Compare { Gt, Lt, Ge, Le, GtOrEq, LtOrEq };

smt::ExprPtr compare_expr(Compare cmp, smt::ExprPtr a, smt::ExprPtr b) {
    switch (cmp) {
        case Compare::Gt: return smt::gt(a, b);
        case Compare::Lt: return smt::lt(a, b);
        case Compare::Ge: return smt::ge(a, b);
        case Compare::Le: return smt::le(a, b);
        case Compare::GtOrEq: return smt::logical_or({smt::gt(a, b), smt::eq(a, b)});
        case Compare::LtOrEq: return smt::logical_or({smt::lt(a, b), smt::eq(a, b)});
    }
    throw std::runtime_error("unreachable comparison kind");
}

/// forall over the renamed variables of the condition; ground conditions
/// stay unquantified because the forall constructor collapses them.
smt::ExprPtr quantified_condition(const FormulaPtr& phi, const LinearPoly& lhs, Compare cmp,
                                  const LinearPoly& rhs) {
    LinearPoly a = rename_poly(lhs);
    LinearPoly b = rename_poly(rhs);
    FormulaPtr guard = rename_formula(phi);
    smt::ExprPtr body = compare_expr(cmp, to_expr(a), to_expr(b));
    if (guard->kind() != Formula::Kind::Top) body = smt::implies(to_expr(guard), body);
    std::set<std::string> binders = vars_of(guard);
    for (const auto& var : a.vars()) binders.insert(var);
    for (const auto& var : b.vars()) binders.insert(var);
    return smt::forall({binders.begin(), binders.end()}, body);
}

PiImage image_of(const PIAssignment& pi, const TermPtr& t, const char* what) {
    PiImage image = apply_pi(pi, t);
    if (!image.pure)
        throw std::runtime_error(std::string(what) + " keeps uninterpreted symbols: " +
                                 to_string(t));
    return image;
}

std::string describe_violation(const SubtractionViolation& violation) {
    return "subtraction argument violation in " + violation.where;
}

AffineInterp zeroed(const AffineInterp& interp, const std::set<int>& zero_positions) {
    AffineInterp out = interp;
    for (int position : zero_positions) out.coeffs[position] = CoefExpr::constant(0);
    return out;
}

PIAssignment decode_model(const TemplateDomain& domain, const PIAssignment& templates,
                          const std::map<std::string, std::int64_t>& values) {
    PIAssignment concrete;
    for (const auto& symbol : domain.symbols) {
        AffineInterp interp;
        for (const auto& coef : templates.at(symbol).coeffs)
            interp.coeffs.push_back(CoefExpr::constant(coef.eval(values)));
        concrete.interps.emplace(symbol, std::move(interp));
    }
    return concrete;
}

PIAssignment decode_pinned(const ConstrainedTRS& trs, PiKind kind, const PinnedModel& pin) {
    TemplateDomain domain = template_domain(trs, kind);
    PIAssignment concrete;
    std::set<std::string> used;
    for (const auto& symbol : domain.symbols) {
        auto found = pin.interpretations.find(symbol.name);
        if (found == pin.interpretations.end()) {
            concrete.interps.emplace(
                symbol, concrete_interp(std::vector<std::int64_t>(symbol.arity + 1, 0)));
            continue;
        }
        if (static_cast<int>(found->second.size()) != symbol.arity + 1)
            throw std::runtime_error("pinned interpretation for '" + symbol.name + "' needs " +
                                     std::to_string(symbol.arity + 1) + " coefficients");
        used.insert(symbol.name);
        concrete.interps.emplace(symbol,
                                 concrete_interp({found->second.begin(), found->second.end()}));
    }
    for (const auto& [name, coeffs] : pin.interpretations)
        if (!used.count(name))
            throw std::runtime_error("pinned interpretation names unknown symbol '" + name + "'");
    return concrete;
}

/// Polynomials go back into the term language by repeated addition, so a
/// variable coefficient of magnitude k costs k nodes; constants are free.
TermPtr poly_to_term(const LinearPoly& poly) {
    const auto& sig = InterpretedSignature::instance();
    std::int64_t budget = 0;
    for (const auto& [var, coef] : poly.coefficients()) {
        std::int64_t k = coef.constant_value();
        budget += k < 0 ? -k : k;
    }
    if (budget > 50000) throw std::runtime_error("interpretation too large to encode as a term");
    TermPtr acc = Term::lit(poly.constant_part().constant_value());
    for (const auto& [var, coef] : poly.coefficients()) {
        std::int64_t k = coef.constant_value();
        TermPtr x = Term::var(var);
        std::int64_t steps = k < 0 ? -k : k;
        for (std::int64_t i = 0; i < steps; ++i)
            acc = Term::app(k > 0 ? sig.plus : sig.minus, {acc, x});
    }
    return acc;
}

FormulaPtr strict_formula(bool gt_direction, const LinearPoly& lhs, const LinearPoly& rhs) {
    TermPtr a = poly_to_term(lhs);
    TermPtr b = poly_to_term(rhs);
    return gt_direction ? Formula::atom(a, Pred::Gt, b) : Formula::atom(b, Pred::Gt, a);
}

FormulaPtr strict_or_equal_formula(bool gt_direction, const LinearPoly& lhs,
                                   const LinearPoly& rhs) {
    TermPtr a = poly_to_term(lhs);
    TermPtr b = poly_to_term(rhs);
    FormulaPtr strict = gt_direction ? Formula::atom(a, Pred::Gt, b) : Formula::atom(b, Pred::Gt, a);
    return Formula::disjunction(strict, Formula::atom(a, Pred::Eq, b));
}

FormulaPtr weak_formula(bool ge_direction, const LinearPoly& lhs, const LinearPoly& rhs) {
    TermPtr a = poly_to_term(lhs);
    TermPtr b = poly_to_term(rhs);
    return ge_direction ? Formula::atom(a, Pred::Ge, b) : Formula::atom(b, Pred::Ge, a);
}

std::string dump_tag(PiKind kind) {
    switch (kind) {
        case PiKind::Legacy: return "legacy-pi";
        case PiKind::GtGeGe: return "pi-gt-ge-ge";
        case PiKind::LtGeLe: return "pi-lt-ge-le";
        case PiKind::GtLeLe: return "pi-gt-le-le";
        case PiKind::LtLeGe: return "pi-lt-le-ge";
    }
    throw std::runtime_error("unreachable interpretation kind");
}

}  // namespace

std::string to_string(PiKind kind) {
    return kind == PiKind::Legacy ? "legacy-pi" : "pi" + variant_suffix(kind);
}

std::string variant_suffix(PiKind kind) {
    switch (kind) {
        case PiKind::Legacy: return "";
        case PiKind::GtGeGe: return "(>,>=,>=)";
        case PiKind::LtGeLe: return "(<,>=,<=)";
        case PiKind::GtLeLe: return "(>,<=,<=)";
        case PiKind::LtLeGe: return "(<,<=,>=)";
    }
    throw std::runtime_error("unreachable interpretation kind");
}

bool strict_is_gt(PiKind kind) { return kind == PiKind::GtGeGe || kind == PiKind::GtLeLe; }

bool rules_are_ge(PiKind kind) { return kind == PiKind::GtGeGe || kind == PiKind::LtGeLe; }

bool reducibles_are_ge(PiKind kind) { return kind == PiKind::GtGeGe || kind == PiKind::LtLeGe; }

bool AffineInterp::concrete() const {
    for (const auto& coef : coeffs)
        if (!coef.is_constant()) return false;
    return true;
}

std::vector<long long> AffineInterp::constant_coeffs() const {
    std::vector<long long> out;
    for (const auto& coef : coeffs) out.push_back(coef.constant_value());
    return out;
}

AffineInterp concrete_interp(const std::vector<std::int64_t>& coeffs) {
    AffineInterp interp;
    for (std::int64_t c : coeffs) interp.coeffs.push_back(CoefExpr::constant(c));
    return interp;
}

const AffineInterp& PIAssignment::at(const Symbol& symbol) const {
    auto found = interps.find(symbol);
    if (found == interps.end())
        throw std::runtime_error("no interpretation for '" + symbol.name + "'");
    return found->second;
}

PiImage apply_pi(const PIAssignment& pi, const TermPtr& t) {
    const auto& sig = InterpretedSignature::instance();
    if (t->is_var()) return {LinearPoly::variable(t->var_name()), true, {}};
    if (t->is_lit()) return {LinearPoly::constant(t->lit_value()), true, {}};
    const Symbol& symbol = t->symbol();
    if (symbol.kind == SymbolKind::Interpreted) {
        if (symbol == sig.zero) return {LinearPoly::constant(0), true, {}};
        PiImage first = apply_pi(pi, t->args()[0]);
        if (symbol == sig.succ) {
            first.poly = first.poly + LinearPoly::constant(1);
            return first;
        }
        if (symbol == sig.pred) {
            first.poly = first.poly - LinearPoly::constant(1);
            return first;
        }
        PiImage second = apply_pi(pi, t->args()[1]);
        PiImage out;
        out.pure = first.pure && second.pure;
        out.residuals = std::move(first.residuals);
        out.residuals.insert(second.residuals.begin(), second.residuals.end());
        out.poly = symbol == sig.plus ? first.poly + second.poly : first.poly - second.poly;
        return out;
    }
    if (pi.defines(symbol)) {
        const AffineInterp& interp = pi.at(symbol);
        if (interp.arity() != symbol.arity)
            throw std::runtime_error("interpretation arity mismatch for '" + symbol.name + "'");
        PiImage out;
        out.poly = LinearPoly::constant(interp.coeffs[0]);
        for (std::size_t i = 0; i < t->args().size(); ++i) {
            const CoefExpr& coef = interp.coeffs[i + 1];
            if (coef.is_zero()) continue;
            PiImage inner = apply_pi(pi, t->args()[i]);
            out.pure = out.pure && inner.pure;
            out.residuals.insert(inner.residuals.begin(), inner.residuals.end());
            out.poly = out.poly + inner.poly.scaled(coef);
        }
        return out;
    }
    PiImage out;
    out.pure = false;
    out.residuals.insert(symbol.name);
    for (const auto& arg : t->args()) {
        PiImage inner = apply_pi(pi, arg);
        out.residuals.insert(inner.residuals.begin(), inner.residuals.end());
    }
    return out;
}

std::map<Symbol, std::set<int>> reducible_positions(const std::vector<DependencyPair>& pairs) {
    std::map<Symbol, std::set<int>> out;
    for (const auto& pair : pairs) {
        auto allowed = vars_of(pair.constraint);
        const auto& args = pair.rhs->args();
        for (std::size_t i = 0; i < args.size(); ++i)
            if (!is_interpreted_term_over(args[i], allowed))
                out[pair.rhs->symbol()].insert(static_cast<int>(i) + 1);
    }
    return out;
}

std::vector<SubtractionViolation> check_subtraction_arguments(
    const ConstrainedTRS& trs, const std::vector<DependencyPair>& pairs) {
    const auto& sig = InterpretedSignature::instance();
    std::vector<SubtractionViolation> out;
    auto scan = [&](const TermPtr& rhs, const FormulaPtr& phi, const std::string& where) {
        auto allowed = vars_of(phi);
        for (const auto& pos : positions(rhs)) {
            TermPtr sub = subterm_at(rhs, pos);
            if (!sub->is_app() || sub->symbol() != sig.minus) continue;
            if (!is_interpreted_term_over(sub->args()[1], allowed)) out.push_back({where, pos});
        }
    };
    for (const auto& rule : trs.rules)
        scan(rule.rhs, rule.constraint, "rule " + std::to_string(rule.id));
    for (const auto& pair : pairs)
        scan(pair.rhs, pair.constraint, "pair " + std::to_string(pair.id));
    return out;
}

BuildResult build_conditions(const DPProblem& problem, PiKind kind,
                             std::optional<std::int64_t> coefficient_bound) {
    BuildResult out;
    if (problem.pairs.empty()) {
        out.structurally_infeasible = true;
        out.reason = "no pairs to orient";
        return out;
    }
    const ConstrainedTRS& trs = *problem.system;
    if (kind != PiKind::Legacy) {
        auto violations = check_subtraction_arguments(trs, problem.pairs);
        if (!violations.empty()) {
            out.structurally_infeasible = true;
            out.reason = describe_violation(violations[0]);
            return out;
        }
    }

    TemplateDomain domain = template_domain(trs, kind);
    for (const auto& symbol : domain.symbols) {
        AffineInterp interp;
        for (int i = 0; i <= symbol.arity; ++i)
            interp.coeffs.push_back(CoefExpr::unknown(coefficient_name(domain, symbol, i)));
        out.templates.interps.emplace(symbol, std::move(interp));
        for (int i = 0; i <= symbol.arity; ++i)
            out.unknown_order.push_back(coefficient_name(domain, symbol, i));
    }
    out.unknown_order.push_back(kBoundName);

    auto& assertions = out.system.assertions;
    LinearPoly c0 = LinearPoly::constant(CoefExpr::unknown(kBoundName));

    if (kind == PiKind::Legacy) {
        auto reducibles = reducible_positions(problem.pairs);
        // Positions whose coefficient must vanish: reducible positions, and
        // left-hand side arguments that keep uninterpreted symbols.  Then
        // right-hand side arguments whose variables escape the constraint
        // and the surviving left arguments, to a fixpoint.
        std::set<std::pair<Symbol, int>> forced;
        for (const auto& [symbol, ps] : reducibles)
            for (int i : ps) forced.emplace(symbol, i);
        for (const auto& pair : problem.pairs) {
            const auto& args = pair.lhs->args();
            for (std::size_t j = 0; j < args.size(); ++j)
                if (!is_interpreted_term(args[j]))
                    forced.emplace(pair.lhs->symbol(), static_cast<int>(j) + 1);
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& pair : problem.pairs) {
                std::set<std::string> allowed = vars_of(pair.constraint);
                const auto& largs = pair.lhs->args();
                for (std::size_t j = 0; j < largs.size(); ++j) {
                    if (forced.count({pair.lhs->symbol(), static_cast<int>(j) + 1})) continue;
                    auto vars = vars_of(largs[j]);
                    allowed.insert(vars.begin(), vars.end());
                }
                const auto& rargs = pair.rhs->args();
                for (std::size_t i = 0; i < rargs.size(); ++i) {
                    std::pair<Symbol, int> key{pair.rhs->symbol(), static_cast<int>(i) + 1};
                    if (forced.count(key)) continue;
                    for (const auto& var : vars_of(rargs[i])) {
                        if (allowed.count(var)) continue;
                        forced.insert(key);
                        changed = true;
                        break;
                    }
                }
            }
        }

        for (const auto& [symbol, position] : forced) {
            out.forced_zero.insert(coefficient_name(domain, symbol, position));
            auto found = out.templates.interps.find(symbol);
            if (found != out.templates.interps.end())
                found->second = zeroed(found->second, {position});
        }

        bool any_strict_possible = false;
        std::vector<std::pair<LinearPoly, LinearPoly>> images;
        for (const auto& pair : problem.pairs) {
            LinearPoly lhs = image_of(out.templates, pair.lhs, "pair left side").poly;
            LinearPoly rhs = image_of(out.templates, pair.rhs, "pair right side").poly;
            if (!(lhs - rhs).is_zero() ||
                simplify_formula(pair.constraint)->kind() == Formula::Kind::Bottom)
                any_strict_possible = true;
            images.emplace_back(std::move(lhs), std::move(rhs));
        }
        if (!any_strict_possible) {
            out.structurally_infeasible = true;
            out.reason =
                "every pair interprets both sides identically, so no strict orientation exists";
            return out;
        }

        for (const auto& name : out.forced_zero)
            assertions.push_back(smt::eq(smt::sym(name), smt::int_const(0)));
        for (std::size_t i = 0; i < problem.pairs.size(); ++i) {
            const auto& pair = problem.pairs[i];
            assertions.push_back(quantified_condition(pair.constraint, images[i].first,
                                                      Compare::Ge, images[i].second));
        }
        for (std::size_t i = 0; i < problem.pairs.size(); ++i) {
            const auto& pair = problem.pairs[i];
            PairGuards guards;
            guards.pair_id = pair.id;
            guards.strict_name = "strict_" + std::to_string(pair.id);
            guards.bound_name = "bound_" + std::to_string(pair.id);
            guards.filter_name = "filter_" + std::to_string(pair.id);
            assertions.push_back(
                smt::implies(smt::sym(guards.strict_name),
                             quantified_condition(pair.constraint, images[i].first, Compare::Gt,
                                                  images[i].second)));
            assertions.push_back(smt::implies(
                smt::sym(guards.bound_name),
                quantified_condition(pair.constraint, images[i].first, Compare::Ge, c0)));
            std::vector<smt::ExprPtr> zero_needed;
            auto in_constraint = vars_of(pair.constraint);
            const auto& largs = pair.lhs->args();
            for (std::size_t j = 0; j < largs.size(); ++j) {
                bool escapes = false;
                for (const auto& var : vars_of(largs[j]))
                    if (!in_constraint.count(var)) escapes = true;
                if (!escapes) continue;
                std::string name =
                    coefficient_name(domain, pair.lhs->symbol(), static_cast<int>(j) + 1);
                if (!out.forced_zero.count(name))
                    zero_needed.push_back(smt::eq(smt::sym(name), smt::int_const(0)));
            }
            assertions.push_back(smt::eq(smt::sym(guards.filter_name),
                                         zero_needed.empty() ? smt::bool_const(true)
                                                             : smt::logical_and(zero_needed)));
            out.guards.push_back(std::move(guards));
        }
    } else {
        for (const auto& symbol : domain.plain)
            for (int i = 1; i <= symbol.arity; ++i)
                assertions.push_back(
                    smt::ge(smt::sym(coefficient_name(domain, symbol, i)), smt::int_const(0)));
        // Sign constraints cover every reducible position of the full
        // dependency-pair set, not only of the pairs still in play: chains
        // over a subproblem may still rewrite below argument positions that
        // only removed pairs expose.
        for (const auto& [symbol, ps] : reducible_positions(compute_dependency_pairs(trs))) {
            for (int i : ps) {
                smt::ExprPtr coef = smt::sym(coefficient_name(domain, symbol, i));
                assertions.push_back(reducibles_are_ge(kind) ? smt::ge(coef, smt::int_const(0))
                                                             : smt::le(coef, smt::int_const(0)));
            }
        }
        Compare rule_cmp = rules_are_ge(kind) ? Compare::Ge : Compare::Le;
        for (const auto& rule : trs.rules) {
            LinearPoly lhs = image_of(out.templates, rule.lhs, "rule left side").poly;
            LinearPoly rhs = image_of(out.templates, rule.rhs, "rule right side").poly;
            assertions.push_back(quantified_condition(rule.constraint, lhs, rule_cmp, rhs));
        }
        Compare weak_cmp = strict_is_gt(kind) ? Compare::GtOrEq : Compare::LtOrEq;
        Compare strict_cmp = strict_is_gt(kind) ? Compare::Gt : Compare::Lt;
        std::vector<std::pair<LinearPoly, LinearPoly>> images;
        for (const auto& pair : problem.pairs) {
            LinearPoly lhs = image_of(out.templates, pair.lhs, "pair left side").poly;
            LinearPoly rhs = image_of(out.templates, pair.rhs, "pair right side").poly;
            assertions.push_back(quantified_condition(pair.constraint, lhs, weak_cmp, rhs));
            images.emplace_back(std::move(lhs), std::move(rhs));
        }
        for (std::size_t i = 0; i < problem.pairs.size(); ++i) {
            const auto& pair = problem.pairs[i];
            PairGuards guards;
            guards.pair_id = pair.id;
            guards.strict_name = "strict_" + std::to_string(pair.id);
            guards.bound_name = "bound_" + std::to_string(pair.id);
            assertions.push_back(
                smt::implies(smt::sym(guards.strict_name),
                             quantified_condition(pair.constraint, images[i].first, strict_cmp,
                                                  images[i].second)));
            assertions.push_back(smt::implies(
                smt::sym(guards.bound_name),
                quantified_condition(pair.constraint, images[i].first, weak_cmp, c0)));
            out.guards.push_back(std::move(guards));
        }
    }

    std::vector<smt::ExprPtr> some_strict;
    std::vector<smt::ExprPtr> some_bound;
    std::vector<smt::ExprPtr> some_filter;
    for (const auto& guards : out.guards) {
        out.system.bool_unknowns.push_back(guards.strict_name);
        out.system.bool_unknowns.push_back(guards.bound_name);
        if (!guards.filter_name.empty()) out.system.bool_unknowns.push_back(guards.filter_name);
        some_strict.push_back(smt::sym(guards.strict_name));
        some_bound.push_back(smt::sym(guards.bound_name));
        if (!guards.filter_name.empty()) some_filter.push_back(smt::sym(guards.filter_name));
    }
    assertions.push_back(smt::logical_or(std::move(some_strict)));
    assertions.push_back(smt::logical_or(std::move(some_bound)));
    if (!some_filter.empty()) assertions.push_back(smt::logical_or(std::move(some_filter)));

    if (coefficient_bound) {
        for (const auto& name : out.unknown_order) {
            if (name == kBoundName) continue;
            assertions.push_back(smt::ge(smt::sym(name), smt::int_const(-*coefficient_bound)));
            assertions.push_back(smt::le(smt::sym(name), smt::int_const(*coefficient_bound)));
        }
    }

    out.system.logic = "NIA";
    out.system.int_unknowns = out.unknown_order;
    out.system.notes.push_back(to_string(kind) + " conditions for pairs " +
                               join_ints(problem.pair_ids()));
    return out;
}

VerifyResult verify_model(const DPProblem& problem, PiKind kind, const PIAssignment& pi,
                          std::int64_t c0, ValidityOracle& oracle) {
    const ConstrainedTRS& trs = *problem.system;
    TemplateDomain domain = template_domain(trs, kind);
    for (const auto& symbol : domain.symbols) {
        if (!pi.defines(symbol))
            throw std::runtime_error("interpretation for '" + symbol.name + "' is missing");
        const AffineInterp& interp = pi.at(symbol);
        if (interp.arity() != symbol.arity)
            throw std::runtime_error("interpretation arity mismatch for '" + symbol.name + "'");
        if (!interp.concrete())
            throw std::runtime_error("interpretation for '" + symbol.name + "' is not concrete");
    }

    VerifyResult out;
    auto reject = [&](std::string why) {
        out.accepted = false;
        out.rejection = std::move(why);
        return out;
    };

    for (const auto& symbol : domain.symbols) {
        const auto coeffs = pi.at(symbol).constant_coeffs();
        for (std::size_t i = 1; i < coeffs.size(); ++i) {
            long long magnitude = coeffs[i] < 0 ? -coeffs[i] : coeffs[i];
            if (magnitude > kVerifiableCoefficient)
                return reject("coefficient " + std::to_string(i) + " of '" + symbol.name +
                              "' is too large to verify");
        }
    }

    bool gt_direction = kind == PiKind::Legacy || strict_is_gt(kind);
    std::vector<std::pair<LinearPoly, LinearPoly>> images;
    if (kind != PiKind::Legacy) {
        auto violations = check_subtraction_arguments(trs, problem.pairs);
        if (!violations.empty()) return reject(describe_violation(violations[0]));
        for (const auto& symbol : domain.plain) {
            const auto coeffs = pi.at(symbol).constant_coeffs();
            for (std::size_t i = 1; i < coeffs.size(); ++i)
                if (coeffs[i] < 0)
                    return reject("coefficient " + std::to_string(i) + " of '" + symbol.name +
                                  "' is negative");
        }
        for (const auto& [symbol, ps] : reducible_positions(compute_dependency_pairs(trs))) {
            const auto coeffs = pi.at(symbol).constant_coeffs();
            for (int i : ps) {
                long long value = coeffs[static_cast<std::size_t>(i)];
                if (reducibles_are_ge(kind) ? value < 0 : value > 0)
                    return reject("reducible position " + std::to_string(i) + " of '" +
                                  symbol.name + "' has a coefficient of the wrong sign");
            }
        }
        for (const auto& rule : trs.rules) {
            LinearPoly lhs = image_of(pi, rule.lhs, "rule left side").poly;
            LinearPoly rhs = image_of(pi, rule.rhs, "rule right side").poly;
            Truth truth = oracle.is_valid(Formula::implication(
                rule.constraint, weak_formula(rules_are_ge(kind), lhs, rhs)));
            if (truth == Truth::No)
                return reject("rule condition fails for rule " + std::to_string(rule.id));
            if (truth == Truth::Undetermined)
                return reject("undetermined rule condition for rule " + std::to_string(rule.id));
        }
        for (const auto& pair : problem.pairs) {
            LinearPoly lhs = image_of(pi, pair.lhs, "pair left side").poly;
            LinearPoly rhs = image_of(pi, pair.rhs, "pair right side").poly;
            Truth truth = oracle.is_valid(Formula::implication(
                pair.constraint, strict_or_equal_formula(gt_direction, lhs, rhs)));
            if (truth == Truth::No)
                return reject("weak pair condition fails for pair " + std::to_string(pair.id));
            if (truth == Truth::Undetermined)
                return reject("undetermined pair condition for pair " + std::to_string(pair.id));
            images.emplace_back(std::move(lhs), std::move(rhs));
        }
    } else {
        for (const auto& pair : problem.pairs) {
            PiImage lhs = apply_pi(pi, pair.lhs);
            PiImage rhs = apply_pi(pi, pair.rhs);
            if (!lhs.pure || !rhs.pure)
                return reject("pair " + std::to_string(pair.id) +
                              " keeps uninterpreted symbols under the interpretation");
            auto allowed = vars_of(pair.constraint);
            for (const auto& var : lhs.poly.vars()) allowed.insert(var);
            for (const auto& var : rhs.poly.vars())
                if (!allowed.count(var))
                    return reject("right-hand variables of pair " + std::to_string(pair.id) +
                                  " escape the constraint and left-hand side");
            Truth truth = oracle.is_valid(
                Formula::implication(pair.constraint, weak_formula(true, lhs.poly, rhs.poly)));
            if (truth == Truth::No)
                return reject("weak decrease fails for pair " + std::to_string(pair.id));
            if (truth == Truth::Undetermined)
                return reject("undetermined weak decrease for pair " + std::to_string(pair.id));
            images.emplace_back(std::move(lhs.poly), std::move(rhs.poly));
        }
    }

    LinearPoly bound = LinearPoly::constant(c0);
    for (std::size_t i = 0; i < problem.pairs.size(); ++i) {
        const auto& pair = problem.pairs[i];
        Truth strict = oracle.is_valid(Formula::implication(
            pair.constraint, strict_formula(gt_direction, images[i].first, images[i].second)));
        if (strict == Truth::Undetermined)
            return reject("undetermined strict comparison for pair " + std::to_string(pair.id));
        if (strict == Truth::Yes) out.classification.strict_pairs.push_back(pair.id);

        FormulaPtr bound_formula =
            kind == PiKind::Legacy
                ? weak_formula(true, images[i].first, bound)
                : strict_or_equal_formula(gt_direction, images[i].first, bound);
        Truth bounded = oracle.is_valid(Formula::implication(pair.constraint, bound_formula));
        if (bounded == Truth::Undetermined)
            return reject("undetermined bound comparison for pair " + std::to_string(pair.id));
        if (bounded == Truth::Yes) out.classification.bounded_pairs.push_back(pair.id);

        if (kind == PiKind::Legacy) {
            auto in_constraint = vars_of(pair.constraint);
            bool filtered = true;
            for (const auto& var : images[i].first.vars())
                if (!in_constraint.count(var)) filtered = false;
            if (filtered) out.classification.filter_pairs.push_back(pair.id);
        }
    }
    if (!out.classification.bounded_pairs.empty()) out.classification.c0 = c0;
    out.accepted = true;
    return out;
}

std::deque<PinnedModel> parse_pinned_models(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array())
        throw std::runtime_error("pinned models: expected an object with a \"models\" array");
    std::deque<PinnedModel> out;
    for (const auto& entry : doc["models"]) {
        std::string label = "pinned model " + std::to_string(out.size() + 1);
        if (!entry.is_object() || !entry.contains("interpretations") ||
            !entry["interpretations"].is_object() || !entry.contains("c0") ||
            !entry["c0"].is_number_integer())
            throw std::runtime_error(label +
                                     ": expected \"interpretations\" object and integer \"c0\"");
        PinnedModel model;
        model.c0 = entry["c0"].get<long long>();
        for (const auto& [name, coeffs] : entry["interpretations"].items()) {
            if (!coeffs.is_array())
                throw std::runtime_error(label + ": coefficients of '" + name +
                                         "' must be an array");
            std::vector<long long> values;
            for (const auto& value : coeffs) {
                if (!value.is_number_integer())
                    throw std::runtime_error(label + ": coefficients of '" + name +
                                             "' must be integers");
                values.push_back(value.get<long long>());
            }
            model.interpretations.emplace(name, std::move(values));
        }
        out.push_back(std::move(model));
    }
    return out;
}

std::deque<PinnedModel> load_pinned_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const std::exception& error) {
        throw std::runtime_error("cannot parse '" + path + "': " + error.what());
    }
    return parse_pinned_models(doc);
}

PiServices::PiServices() : PiServices(smt::SolverConfig{}) {}

PiServices::PiServices(smt::SolverConfig config) : solver(std::move(config)), oracle(solver) {}

ProcessorOutcome pi_processor(const DPProblem& problem, PiKind kind, PiServices& services) {
    ProcessorOutcome outcome;
    Justification& just = outcome.justification;
    just.processor = kind == PiKind::Legacy ? "legacy-pi" : "pi";
    just.variant = variant_suffix(kind);
    if (problem.pairs.empty()) {
        just.note = "nothing to orient";
        return outcome;
    }

    std::optional<PIAssignment> pi;
    std::int64_t c0 = 0;
    if (!services.pinned.empty()) {
        PinnedModel pin = std::move(services.pinned.front());
        services.pinned.pop_front();
        pi = decode_pinned(*problem.system, kind, pin);
        c0 = pin.c0;
        just.solver_status = "pinned";
    } else {
        BuildResult build = build_conditions(problem, kind, services.coefficient_bound);
        if (build.structurally_infeasible) {
            just.solver_status = "infeasible";
            just.note = build.reason;
            outcome.subproblems.push_back(problem);
            return outcome;
        }
        std::string label = dump_tag(kind) + "-" + std::to_string(++services.checks_issued);
        smt::SolverVerdict verdict = smt::check(build.system, services.solver, label);
        if (services.on_check) services.on_check(build.system, verdict);
        just.solver_status = smt::to_string(verdict.status);
        just.solver_seconds = verdict.seconds;
        if (verdict.status == smt::Status::Unsat) {
            just.note = "no interpretation of this shape exists";
            outcome.subproblems.push_back(problem);
            return outcome;
        }
        if (verdict.status != smt::Status::Sat) {
            just.note = "interpretation synthesis undetermined";
            outcome.subproblems.push_back(problem);
            return outcome;
        }
        TemplateDomain domain = template_domain(*problem.system, kind);
        pi = decode_model(domain, build.templates, verdict.model->ints);
        c0 = verdict.model->ints.at(kBoundName);
    }

    VerifyResult checked = verify_model(problem, kind, *pi, c0, services.oracle);
    if (!checked.accepted) {
        just.note = "model rejected: " + checked.rejection;
        outcome.subproblems.push_back(problem);
        return outcome;
    }

    const Classification& cls = checked.classification;
    std::vector<std::set<int>> removals;
    removals.emplace_back(cls.strict_pairs.begin(), cls.strict_pairs.end());
    removals.emplace_back(cls.bounded_pairs.begin(), cls.bounded_pairs.end());
    if (kind == PiKind::Legacy)
        removals.emplace_back(cls.filter_pairs.begin(), cls.filter_pairs.end());

    std::set<std::vector<int>> seen;
    std::set<int> removed_anywhere;
    for (const auto& removal : removals) {
        DPProblem sub;
        sub.system = problem.system;
        for (const auto& pair : problem.pairs)
            if (!removal.count(pair.id)) sub.pairs.push_back(pair);
        if (!seen.insert(sub.pair_ids()).second) continue;
        outcome.subproblems.push_back(std::move(sub));
        removed_anywhere.insert(removal.begin(), removal.end());
    }
    just.removed_pairs.assign(removed_anywhere.begin(), removed_anywhere.end());
    for (const auto& [symbol, interp] : pi->interps)
        just.interpretations.emplace(symbol.name, interp.constant_coeffs());
    just.c0 = cls.c0;
    return outcome;
}

StrategyEntry make_pi_entry(PiKind kind, std::shared_ptr<PiServices> services) {
    if (!services) throw std::runtime_error("interpretation processors need services");
    return {to_string(kind),
            [kind, services](const DPProblem& problem) {
                return pi_processor(problem, kind, *services);
            }};
}

Strategy build_strategy(const std::string& tokens, std::shared_ptr<PiServices> services) {
    Strategy out;
    std::stringstream stream(tokens);
    std::string token;
    while (std::getline(stream, token, ',')) {
        auto begin = token.find_first_not_of(" \t");
        auto end = token.find_last_not_of(" \t");
        token = begin == std::string::npos ? "" : token.substr(begin, end - begin + 1);
        if (token.empty()) throw std::runtime_error("empty strategy name");
        if (token == "scc")
            out.push_back(make_scc_entry());
        else if (token == "legacy" || token == "legacy-pi")
            out.push_back(make_pi_entry(PiKind::Legacy, services));
        else if (token == "pi:gt-ge-ge")
            out.push_back(make_pi_entry(PiKind::GtGeGe, services));
        else if (token == "pi:lt-ge-le")
            out.push_back(make_pi_entry(PiKind::LtGeLe, services));
        else if (token == "pi:gt-le-le")
            out.push_back(make_pi_entry(PiKind::GtLeLe, services));
        else if (token == "pi:lt-le-ge")
            out.push_back(make_pi_entry(PiKind::LtLeGe, services));
        else
            throw std::runtime_error("unknown strategy name '" + token + "'");
    }
    if (out.empty()) throw std::runtime_error("empty strategy");
    return out;
}

std::string default_strategy_tokens() {
    return "scc,legacy,pi:gt-ge-ge,pi:gt-le-le,pi:lt-ge-le,pi:lt-le-ge";
}

Strategy default_strategy(std::shared_ptr<PiServices> services) {
    return build_strategy(default_strategy_tokens(), services);
}

}  // namespace monoterm
