#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monoterm/validity.hpp"

using namespace monoterm;

namespace {

const InterpretedSignature& sig = InterpretedSignature::instance();

TermPtr s_tower(TermPtr base, int n) {
    const Symbol& step = n >= 0 ? sig.succ : sig.pred;
    for (int i = 0; i < (n >= 0 ? n : -n); ++i) base = Term::app(step, {base});
    return base;
}

TermPtr zero() { return Term::app(sig.zero, {}); }

FormulaPtr random_formula(std::mt19937& rng, int depth) {
    auto random_side = [&rng](auto&& self, int d) -> TermPtr {
        std::uniform_int_distribution<int> pick(0, d <= 0 ? 1 : 3);
        switch (pick(rng)) {
            case 0:
                return Term::var(std::uniform_int_distribution<int>(0, 1)(rng) ? "x" : "y");
            case 1:
                return Term::lit(std::uniform_int_distribution<int>(-8, 8)(rng));
            case 2:
                return Term::app(sig.succ, {self(self, d - 1)});
            default:
                return Term::app(sig.plus, {self(self, d - 1), self(self, d - 1)});
        }
    };
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 3);
    switch (pick(rng)) {
        case 0: {
            Pred preds[] = {Pred::Eq, Pred::Gt, Pred::Ge};
            return Formula::atom(random_side(random_side, 2),
                                 preds[std::uniform_int_distribution<int>(0, 2)(rng)],
                                 random_side(random_side, 2));
        }
        case 1:
            return Formula::negation(random_formula(rng, depth - 1));
        case 2:
            return Formula::conjunction(random_formula(rng, depth - 1),
                                        random_formula(rng, depth - 1));
        default:
            return Formula::implication(random_formula(rng, depth - 1),
                                        random_formula(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("constant differences fold without a solver") {
    ValidityOracle oracle;

    // s^101(0) > x  =>  -1 - x >= -2 - x
    auto minus1 = Term::app(sig.minus, {Term::lit(-1), Term::var("x")});
    auto minus2 = Term::app(sig.minus, {Term::lit(-2), Term::var("x")});
    auto phi = Formula::implication(
        Formula::atom(s_tower(zero(), 101), Pred::Gt, Term::var("x")),
        Formula::atom(minus1, Pred::Ge, minus2));
    CHECK(oracle.is_valid(phi) == Truth::Yes);
    CHECK(oracle.solver_calls() == 0);

    CHECK(oracle.is_valid(Formula::atom(Term::var("x"), Pred::Eq, Term::var("x"))) ==
          Truth::Yes);
    CHECK(oracle.is_satisfiable(Formula::atom(Term::var("x"), Pred::Gt,
                                              Term::app(sig.succ, {Term::var("x")}))) ==
          Truth::No);
    CHECK(oracle.is_valid(Formula::bottom()) == Truth::No);
    CHECK(oracle.is_satisfiable(Formula::top()) == Truth::Yes);
    CHECK(oracle.solver_calls() == 0);
}

TEST_CASE("ground formulas are evaluated directly") {
    ValidityOracle oracle;
    auto ground = Formula::conjunction(
        Formula::atom(s_tower(zero(), 5), Pred::Gt, Term::lit(4)),
        Formula::negation(Formula::atom(Term::lit(-3), Pred::Ge, zero())));
    CHECK(oracle.is_valid(ground) == Truth::Yes);
    CHECK(oracle.is_satisfiable(Formula::negation(ground)) == Truth::No);
    CHECK(oracle.solver_calls() == 0);
}

TEST_CASE("simplify_formula folds connectives") {
    auto residual = Formula::atom(Term::var("x"), Pred::Gt, zero());
    auto sugar = Formula::implication(
        Formula::conjunction(residual, Formula::atom(Term::lit(1), Pred::Gt, Term::lit(0))),
        Formula::top());
    CHECK(simplify_formula(sugar)->kind() == Formula::Kind::Top);

    auto keeps = Formula::conjunction(residual, Formula::top());
    CHECK(equal_formulas(simplify_formula(keeps), residual));

    auto contradiction = Formula::conjunction(
        residual, Formula::atom(Term::lit(0), Pred::Gt, Term::lit(1)));
    CHECK(simplify_formula(contradiction)->kind() == Formula::Kind::Bottom);

    auto negated_conclusion = Formula::implication(residual, Formula::bottom());
    auto reduced = simplify_formula(negated_conclusion);
    CHECK(reduced->kind() == Formula::Kind::Not);
}

TEST_CASE("solver decides residual formulas") {
    ValidityOracle oracle;
    oracle.config().timeout_secs = 60;

    // 101 > x implies x <= 100 over the integers
    auto phi = Formula::implication(
        Formula::atom(s_tower(zero(), 101), Pred::Gt, Term::var("x")),
        Formula::atom(Term::lit(100), Pred::Ge, Term::var("x")));
    CHECK(oracle.is_valid(phi) == Truth::Yes);
    CHECK(oracle.solver_calls() == 1);

    // but x <= 99 does not follow
    auto wrong = Formula::implication(
        Formula::atom(s_tower(zero(), 101), Pred::Gt, Term::var("x")),
        Formula::atom(Term::lit(99), Pred::Ge, Term::var("x")));
    CHECK(oracle.is_valid(wrong) == Truth::No);

    CHECK(oracle.is_satisfiable(Formula::atom(Term::var("x"), Pred::Gt, Term::lit(5))) ==
          Truth::Yes);

    int before = oracle.solver_calls();
    CHECK(oracle.is_valid(phi) == Truth::Yes);
    CHECK(oracle.solver_calls() == before);
}

TEST_CASE("undetermined on solver trouble") {
    smt::SolverConfig cfg;
    cfg.command = "printf 'unknown\\n'";
    ValidityOracle oracle(cfg);
    auto phi = Formula::atom(Term::var("x"), Pred::Gt, Term::lit(5));
    CHECK(oracle.is_valid(phi) == Truth::Undetermined);
    CHECK(oracle.is_satisfiable(phi) == Truth::Undetermined);
}

TEST_CASE("validity is dual to unsatisfiability of the negation") {
    ValidityOracle oracle;
    oracle.config().timeout_secs = 60;
    std::mt19937 rng(41);
    for (int i = 0; i < 40; ++i) {
        auto phi = random_formula(rng, 2);
        Truth valid = oracle.is_valid(phi);
        Truth negated_sat = oracle.is_satisfiable(Formula::negation(phi));
        REQUIRE(valid != Truth::Undetermined);
        REQUIRE(negated_sat != Truth::Undetermined);
        CHECK((valid == Truth::Yes) == (negated_sat == Truth::No));
    }
}
