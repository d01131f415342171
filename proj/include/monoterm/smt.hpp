#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace monoterm::smt {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// A small SMT-LIB expression tree.  Add/Mul/And/Or are n-ary and collapse
/// to their unit when given fewer than two operands.
struct Expr {
    enum class Kind {
        IntConst,
        BoolConst,
        Sym,
        Add,
        Sub,
        Neg,
        Mul,
        Eq,
        Ge,
        Gt,
        Le,
        Lt,
        Not,
        And,
        Or,
        Implies,
        Forall
    };

    Kind kind;
    std::int64_t value = 0;
    std::string name;
    std::vector<ExprPtr> operands;
    std::vector<std::string> bound;
};

ExprPtr int_const(std::int64_t value);
ExprPtr bool_const(bool value);
ExprPtr sym(std::string name);
ExprPtr add(std::vector<ExprPtr> operands);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr mul(std::vector<ExprPtr> operands);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr ge(ExprPtr a, ExprPtr b);
ExprPtr gt(ExprPtr a, ExprPtr b);
ExprPtr le(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr logical_not(ExprPtr a);
ExprPtr logical_and(std::vector<ExprPtr> operands);
ExprPtr logical_or(std::vector<ExprPtr> operands);
ExprPtr implies(ExprPtr a, ExprPtr b);
/// Universal quantification over integer variables; an empty binder list
/// collapses to the body.
ExprPtr forall(std::vector<std::string> bound, ExprPtr body);

/// One synthesis or validity query: a logic tag, declared unknowns, and the
/// assertions over them.
struct ConstraintSystem {
    std::string logic = "NIA";
    std::vector<std::string> int_unknowns;
    std::vector<std::string> bool_unknowns;
    std::vector<ExprPtr> assertions;
    std::vector<std::string> notes;
    bool want_model = true;
};

/// Deterministic rendering: the same system always emits byte-identical
/// text.  Every symbol occurring free in an assertion must be declared;
/// negative numerals render as (- N).
std::string emit_smtlib(const ConstraintSystem& cs);

enum class Status { Sat, Unsat, Unknown, Timeout };

std::string to_string(Status status);

struct Model {
    std::map<std::string, std::int64_t> ints;
    std::map<std::string, bool> bools;
};

/// model is present exactly when status is Sat, and then contains a value
/// for every declared unknown.
struct SolverVerdict {
    Status status = Status::Unknown;
    std::optional<Model> model;
    double seconds = 0.0;
};

/// Infrastructure failures: the solver could not be run or spoke something
/// unintelligible.  Distinct from Unknown/Timeout, which are honest answers.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    std::string command = "z3 -in";
    double timeout_secs = 300.0;
    std::string dump_dir;
    std::string force_logic;
    bool retry_on_unknown = false;
    double retry_factor = 2.0;
};

/// Runs one check-sat round trip against the configured external solver.
/// The script is piped to the command's stdin; the first status token of its
/// output decides the verdict.  When dump_dir is set the script is persisted
/// as <dump_dir>/<label>.smt2.
SolverVerdict check(const ConstraintSystem& cs, const SolverConfig& cfg,
                    const std::string& label);

struct Env {
    std::map<std::string, std::int64_t> ints;
    std::map<std::string, bool> bools;
};

std::int64_t eval_int(const ExprPtr& e, const Env& env);
bool eval_bool(const ExprPtr& e, const Env& env);

/// Replays a model against the system's assertions, grid-sampling bound
/// variables over [lo, hi] (every integer for one binder, a fixed stride for
/// more).  Returns a description of the first violated assertion, or nullopt
/// when the model survives.
std::optional<std::string> find_model_violation(const ConstraintSystem& cs, const Model& model,
                                                std::int64_t lo, std::int64_t hi);

}  // namespace monoterm::smt
