#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "monoterm/term.hpp"

namespace monoterm {

/// Product of unknowns, kept sorted; the empty monomial is the constant one.
using Monomial = std::vector<std::string>;

/// Integer polynomial over solver unknowns, e.g. 2*a*b - 3*c + 7.  These are
/// the coefficients of interpretation templates before a model is known;
/// after instantiation they collapse to constants.
class CoefExpr {
public:
    CoefExpr() = default;
    static CoefExpr constant(std::int64_t value);
    static CoefExpr unknown(const std::string& name);

    CoefExpr operator+(const CoefExpr& other) const;
    CoefExpr operator-(const CoefExpr& other) const;
    CoefExpr operator*(const CoefExpr& other) const;
    CoefExpr operator-() const;
    bool operator==(const CoefExpr& other) const { return terms_ == other.terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::int64_t constant_value() const;

    std::set<std::string> unknowns() const;
    std::int64_t eval(const std::map<std::string, std::int64_t>& env) const;
    CoefExpr instantiate(const std::map<std::string, std::int64_t>& env) const;

    const std::map<Monomial, std::int64_t>& terms() const { return terms_; }

    std::string to_string() const;

private:
    // invariant: no zero entries
    std::map<Monomial, std::int64_t> terms_;
};

/// Affine form c + sum(coeff_x * x) over term variables, with CoefExpr
/// coefficients.  Zero coefficients are never stored.
class LinearPoly {
public:
    LinearPoly() = default;
    static LinearPoly constant(CoefExpr c);
    static LinearPoly constant(std::int64_t c);
    static LinearPoly variable(const std::string& name);

    LinearPoly operator+(const LinearPoly& other) const;
    LinearPoly operator-(const LinearPoly& other) const;
    LinearPoly operator-() const;
    bool operator==(const LinearPoly& other) const;

    /// Multiplies every coefficient, including the constant.
    LinearPoly scaled(const CoefExpr& factor) const;

    bool is_zero() const;
    const CoefExpr& constant_part() const { return constant_; }
    CoefExpr coefficient_of(const std::string& var) const;
    const std::map<std::string, CoefExpr>& coefficients() const { return coeffs_; }

    /// Term variables with a (structurally) nonzero coefficient.
    std::set<std::string> vars() const;
    std::set<std::string> unknowns() const;

    LinearPoly instantiate(const std::map<std::string, std::int64_t>& unknown_env) const;
    std::int64_t eval(const std::map<std::string, std::int64_t>& unknown_env,
                      const std::map<std::string, std::int64_t>& var_env) const;

    std::string to_string() const;

private:
    CoefExpr constant_;
    std::map<std::string, CoefExpr> coeffs_;

    void add_coeff(const std::string& var, const CoefExpr& c);
};

/// Affine normal form of a term of T(G, V); throws on uninterpreted symbols.
LinearPoly linearize(const TermPtr& t);

}  // namespace monoterm
