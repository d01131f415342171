#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "monoterm/smt.hpp"

using namespace monoterm;
using namespace monoterm::smt;

namespace {

ConstraintSystem small_system() {
    ConstraintSystem cs;
    cs.logic = "QF_LIA";
    cs.int_unknowns = {"a", "b"};
    cs.bool_unknowns = {"flag"};
    cs.assertions = {gt(sym("a"), int_const(3)), lt(sym("a"), int_const(5)),
                     eq(sym("b"), int_const(-7)), sym("flag")};
    return cs;
}

}  // namespace

TEST_CASE("emission is deterministic and complete") {
    auto cs = small_system();
    cs.notes = {"small check"};
    std::string first = emit_smtlib(cs);
    std::string second = emit_smtlib(small_system());
    CHECK(first == "; small check\n" + second);
    CHECK(second ==
          "(set-logic QF_LIA)\n"
          "(declare-fun a () Int)\n"
          "(declare-fun b () Int)\n"
          "(declare-fun flag () Bool)\n"
          "(assert (> a 3))\n"
          "(assert (< a 5))\n"
          "(assert (= b (- 7)))\n"
          "(assert flag)\n"
          "(check-sat)\n"
          "(get-model)\n");
}

TEST_CASE("emission of quantifiers and n-ary operators") {
    ConstraintSystem cs;
    cs.logic = "NIA";
    cs.int_unknowns = {"c"};
    cs.assertions = {forall({"v", "w"},
                            implies(ge(sym("v"), sym("w")),
                                    ge(add({sym("v"), sym("c"), int_const(1)}), sym("w"))))};
    cs.want_model = false;
    CHECK(emit_smtlib(cs) ==
          "(set-logic NIA)\n"
          "(declare-fun c () Int)\n"
          "(assert (forall ((v Int) (w Int)) (=> (>= v w) (>= (+ v c 1) w))))\n"
          "(check-sat)\n");

    CHECK(logical_and({})->kind == Expr::Kind::BoolConst);
    CHECK(add({})->value == 0);
    CHECK(mul({sym("a")})->kind == Expr::Kind::Sym);
    CHECK(forall({}, bool_const(true))->kind == Expr::Kind::BoolConst);
}

TEST_CASE("emission validates declarations") {
    ConstraintSystem cs;
    cs.int_unknowns = {"a"};
    cs.assertions = {gt(sym("a"), sym("missing"))};
    CHECK_THROWS_AS(emit_smtlib(cs), std::runtime_error);

    ConstraintSystem dup;
    dup.int_unknowns = {"a", "a"};
    CHECK_THROWS_AS(emit_smtlib(dup), std::runtime_error);

    ConstraintSystem quantified;
    quantified.assertions = {forall({"v"}, ge(sym("v"), int_const(0)))};
    CHECK_NOTHROW(emit_smtlib(quantified));
}

TEST_CASE("expression evaluation") {
    Env env;
    env.ints = {{"a", 4}, {"b", -2}};
    env.bools = {{"flag", true}};
    CHECK(eval_int(add({sym("a"), sym("b"), int_const(1)}), env) == 3);
    CHECK(eval_int(mul({sym("a"), sym("b")}), env) == -8);
    CHECK(eval_int(neg(sym("a")), env) == -4);
    CHECK(eval_int(sub(sym("a"), sym("b")), env) == 6);
    CHECK(eval_bool(implies(sym("flag"), gt(sym("a"), sym("b"))), env));
    CHECK(!eval_bool(logical_not(sym("flag")), env));
    CHECK(eval_bool(logical_or({bool_const(false), le(sym("b"), int_const(0))}), env));
    CHECK_THROWS_AS(eval_int(sym("nope"), env), std::runtime_error);
}

TEST_CASE("fake solver round trips") {
    auto cs = small_system();
    SolverConfig cfg;

    SUBCASE("sat with model") {
        cfg.command =
            "printf 'sat\\n((define-fun a () Int 4)\\n(define-fun b () Int (- 7))\\n"
            "(define-fun flag () Bool true))\\n'";
        auto verdict = check(cs, cfg, "fake_sat");
        CHECK(verdict.status == Status::Sat);
        REQUIRE(verdict.model.has_value());
        CHECK(verdict.model->ints.at("a") == 4);
        CHECK(verdict.model->ints.at("b") == -7);
        CHECK(verdict.model->bools.at("flag") == true);
    }

    SUBCASE("model defaults cover missing unknowns") {
        cfg.command = "printf 'sat\\n((define-fun a () Int 4))\\n'";
        auto verdict = check(cs, cfg, "fake_partial");
        REQUIRE(verdict.model.has_value());
        CHECK(verdict.model->ints.at("a") == 4);
        CHECK(verdict.model->ints.at("b") == 0);
        CHECK(verdict.model->bools.at("flag") == false);
    }

    SUBCASE("unsat with trailing model error") {
        cfg.command =
            "printf 'unsat\\n(error \"line 11 column 10: model is not available\")\\n'";
        auto verdict = check(cs, cfg, "fake_unsat");
        CHECK(verdict.status == Status::Unsat);
        CHECK(!verdict.model.has_value());
    }

    SUBCASE("unknown status") {
        cfg.command = "printf 'unknown\\n'";
        CHECK(check(cs, cfg, "fake_unknown").status == Status::Unknown);
    }

    SUBCASE("garbage output raises a protocol error") {
        cfg.command = "printf 'segmentation fault\\n'";
        CHECK_THROWS_AS(check(cs, cfg, "fake_garbage"), ProtocolError);
    }

    SUBCASE("missing command raises a protocol error") {
        cfg.command = "definitely-not-a-solver-binary --help";
        CHECK_THROWS_AS(check(cs, cfg, "fake_missing"), ProtocolError);
    }

    SUBCASE("empty output raises a protocol error") {
        cfg.command = "true";
        CHECK_THROWS_AS(check(cs, cfg, "fake_empty"), ProtocolError);
    }
}

TEST_CASE("timeout kills the solver promptly") {
    auto cs = small_system();
    SolverConfig cfg;
    cfg.command = "sleep 30";
    cfg.timeout_secs = 1.0;
    auto start = std::chrono::steady_clock::now();
    auto verdict = check(cs, cfg, "slow");
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(verdict.status == Status::Timeout);
    CHECK(wall <= 2.0);
}

TEST_CASE("retry on unknown reruns the query") {
    auto cs = small_system();
    SolverConfig cfg;
    cfg.command = "printf 'unknown\\n'";
    cfg.retry_on_unknown = true;
    cfg.timeout_secs = 5;
    auto verdict = check(cs, cfg, "fake_retry");
    CHECK(verdict.status == Status::Unknown);
}

TEST_CASE("model replay catches violations") {
    auto cs = small_system();
    Model good{{{"a", 4}, {"b", -7}}, {{"flag", true}}};
    CHECK(!find_model_violation(cs, good, -200, 200).has_value());
    Model bad{{{"a", 9}, {"b", -7}}, {{"flag", true}}};
    auto violation = find_model_violation(cs, bad, -200, 200);
    REQUIRE(violation.has_value());
    CHECK(violation->find("(< a 5)") != std::string::npos);

    ConstraintSystem quantified;
    quantified.int_unknowns = {"c"};
    quantified.assertions = {forall({"v"}, gt(add({sym("v"), sym("c")}), sym("v")))};
    CHECK(!find_model_violation(quantified, Model{{{"c", 1}}, {}}, -200, 200).has_value());
    CHECK(find_model_violation(quantified, Model{{{"c", 0}}, {}}, -200, 200).has_value());
}

TEST_CASE("real solver end to end") {
    SolverConfig cfg;
    cfg.timeout_secs = 60;

    auto cs = small_system();
    auto verdict = check(cs, cfg, "real_sat");
    REQUIRE(verdict.status == Status::Sat);
    REQUIRE(verdict.model.has_value());
    CHECK(verdict.model->ints.at("a") == 4);
    CHECK(verdict.model->ints.at("b") == -7);
    CHECK(verdict.model->bools.at("flag") == true);
    CHECK(!find_model_violation(cs, *verdict.model, -200, 200).has_value());

    ConstraintSystem unsat_cs;
    unsat_cs.logic = "QF_LIA";
    unsat_cs.int_unknowns = {"x"};
    unsat_cs.assertions = {gt(sym("x"), int_const(0)), lt(sym("x"), int_const(0))};
    CHECK(check(unsat_cs, cfg, "real_unsat").status == Status::Unsat);

    ConstraintSystem quantified;
    quantified.logic = "NIA";
    quantified.int_unknowns = {"c"};
    quantified.assertions = {
        forall({"v"}, implies(gt(sym("v"), int_const(0)),
                              ge(mul({sym("c"), sym("v")}), sym("v"))))};
    auto qverdict = check(quantified, cfg, "real_quantified");
    REQUIRE(qverdict.status == Status::Sat);
    CHECK(qverdict.model->ints.at("c") >= 1);
    CHECK(!find_model_violation(quantified, *qverdict.model, -200, 200).has_value());
}

TEST_CASE("scripts are dumped when requested") {
    auto cs = small_system();
    SolverConfig cfg;
    cfg.command = "printf 'unsat\\n'";
    cfg.dump_dir = "smt_dump_test";
    check(cs, cfg, "dump me/now");
    std::ifstream file("smt_dump_test/dump_me_now.smt2");
    REQUIRE(file.good());
    std::string line;
    std::getline(file, line);
    CHECK(line == "(set-logic QF_LIA)");
    std::filesystem::remove_all("smt_dump_test");
}
