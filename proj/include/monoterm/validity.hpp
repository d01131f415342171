#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "monoterm/formula.hpp"
#include "monoterm/linpoly.hpp"
#include "monoterm/smt.hpp"

namespace monoterm {

enum class Truth { Yes, No, Undetermined };

/// Rewrites every atom whose affine difference is constant into true/false
/// and folds the connectives.  The result is equivalent over the integers;
/// formulas without variables always collapse to Top or Bottom.
FormulaPtr simplify_formula(const FormulaPtr& phi);

smt::ExprPtr to_expr(const CoefExpr& coef);
smt::ExprPtr to_expr(const LinearPoly& poly);
smt::ExprPtr to_expr(const FormulaPtr& phi);

/// Decides validity and satisfiability of interpreted formulas.  Ground and
/// constant-difference cases are settled by evaluation; only residual
/// questions reach the external solver (as QF_LIA queries), and identical
/// formulas are answered from a cache.
class ValidityOracle {
public:
    ValidityOracle() = default;
    explicit ValidityOracle(smt::SolverConfig config);

    Truth is_valid(const FormulaPtr& phi);
    Truth is_satisfiable(const FormulaPtr& phi);

    int solver_calls() const { return solver_calls_; }

    const smt::SolverConfig& config() const { return config_; }
    smt::SolverConfig& config() { return config_; }

private:
    smt::SolverConfig config_;
    int solver_calls_ = 0;
    int query_counter_ = 0;
    std::map<std::string, Truth> sat_cache_;

    Truth solve_satisfiable(const FormulaPtr& phi);
};

}  // namespace monoterm
