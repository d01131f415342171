#include "monoterm/linpoly.hpp"

#include <algorithm>
#include <stdexcept>

namespace monoterm {

CoefExpr CoefExpr::constant(std::int64_t value) {
    CoefExpr e;
    if (value != 0) e.terms_[{}] = value;
    return e;
}

CoefExpr CoefExpr::unknown(const std::string& name) {
    CoefExpr e;
    e.terms_[{name}] = 1;
    return e;
}

CoefExpr CoefExpr::operator+(const CoefExpr& other) const {
    CoefExpr out = *this;
    for (const auto& [mono, c] : other.terms_) {
        auto it = out.terms_.find(mono);
        if (it == out.terms_.end()) {
            out.terms_[mono] = c;
        } else if ((it->second += c) == 0) {
            out.terms_.erase(it);
        }
    }
    return out;
}

CoefExpr CoefExpr::operator-(const CoefExpr& other) const {
    return *this + (-other);
}

CoefExpr CoefExpr::operator-() const {
    CoefExpr out;
    for (const auto& [mono, c] : terms_) out.terms_[mono] = -c;
    return out;
}

CoefExpr CoefExpr::operator*(const CoefExpr& other) const {
    CoefExpr out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : other.terms_) {
            Monomial merged = ma;
            merged.insert(merged.end(), mb.begin(), mb.end());
            std::sort(merged.begin(), merged.end());
            auto it = out.terms_.find(merged);
            if (it == out.terms_.end()) {
                out.terms_[merged] = ca * cb;
            } else if ((it->second += ca * cb) == 0) {
                out.terms_.erase(it);
            }
        }
    }
    return out;
}

bool CoefExpr::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::int64_t CoefExpr::constant_value() const {
    if (!is_constant()) throw std::runtime_error("coefficient " + to_string() + " is symbolic");
    return terms_.empty() ? 0 : terms_.begin()->second;
}

std::set<std::string> CoefExpr::unknowns() const {
    std::set<std::string> out;
    for (const auto& [mono, c] : terms_) out.insert(mono.begin(), mono.end());
    return out;
}

std::int64_t CoefExpr::eval(const std::map<std::string, std::int64_t>& env) const {
    std::int64_t total = 0;
    for (const auto& [mono, c] : terms_) {
        std::int64_t value = c;
        for (const auto& name : mono) {
            auto it = env.find(name);
            if (it == env.end())
                throw std::runtime_error("unbound unknown '" + name + "' in evaluation");
            value *= it->second;
        }
        total += value;
    }
    return total;
}

CoefExpr CoefExpr::instantiate(const std::map<std::string, std::int64_t>& env) const {
    return CoefExpr::constant(eval(env));
}

std::string CoefExpr::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, c] : terms_) {
        std::int64_t value = c;
        if (first) {
            if (value < 0) {
                out += "-";
                value = -value;
            }
        } else {
            out += value < 0 ? " - " : " + ";
            if (value < 0) value = -value;
        }
        first = false;
        if (mono.empty()) {
            out += std::to_string(value);
            continue;
        }
        if (value != 1) out += std::to_string(value) + "*";
        for (std::size_t i = 0; i < mono.size(); ++i) {
            if (i > 0) out += "*";
            out += mono[i];
        }
    }
    return out;
}

void LinearPoly::add_coeff(const std::string& var, const CoefExpr& c) {
    auto it = coeffs_.find(var);
    if (it == coeffs_.end()) {
        if (!c.is_zero()) coeffs_.emplace(var, c);
        return;
    }
    CoefExpr sum = it->second + c;
    if (sum.is_zero())
        coeffs_.erase(it);
    else
        it->second = sum;
}

LinearPoly LinearPoly::constant(CoefExpr c) {
    LinearPoly p;
    p.constant_ = std::move(c);
    return p;
}

LinearPoly LinearPoly::constant(std::int64_t c) {
    return constant(CoefExpr::constant(c));
}

LinearPoly LinearPoly::variable(const std::string& name) {
    LinearPoly p;
    p.coeffs_.emplace(name, CoefExpr::constant(1));
    return p;
}

LinearPoly LinearPoly::operator+(const LinearPoly& other) const {
    LinearPoly out = *this;
    out.constant_ = out.constant_ + other.constant_;
    for (const auto& [var, c] : other.coeffs_) out.add_coeff(var, c);
    return out;
}

LinearPoly LinearPoly::operator-(const LinearPoly& other) const {
    return *this + (-other);
}

LinearPoly LinearPoly::operator-() const {
    LinearPoly out;
    out.constant_ = -constant_;
    for (const auto& [var, c] : coeffs_) out.coeffs_.emplace(var, -c);
    return out;
}

bool LinearPoly::operator==(const LinearPoly& other) const {
    return constant_ == other.constant_ && coeffs_ == other.coeffs_;
}

LinearPoly LinearPoly::scaled(const CoefExpr& factor) const {
    LinearPoly out;
    out.constant_ = constant_ * factor;
    for (const auto& [var, c] : coeffs_) {
        CoefExpr scaled = c * factor;
        if (!scaled.is_zero()) out.coeffs_.emplace(var, scaled);
    }
    return out;
}

bool LinearPoly::is_zero() const {
    return constant_.is_zero() && coeffs_.empty();
}

CoefExpr LinearPoly::coefficient_of(const std::string& var) const {
    auto it = coeffs_.find(var);
    return it == coeffs_.end() ? CoefExpr() : it->second;
}

std::set<std::string> LinearPoly::vars() const {
    std::set<std::string> out;
    for (const auto& [var, c] : coeffs_) out.insert(var);
    return out;
}

std::set<std::string> LinearPoly::unknowns() const {
    std::set<std::string> out = constant_.unknowns();
    for (const auto& [var, c] : coeffs_)
        for (const auto& u : c.unknowns()) out.insert(u);
    return out;
}

LinearPoly LinearPoly::instantiate(const std::map<std::string, std::int64_t>& unknown_env) const {
    LinearPoly out;
    out.constant_ = constant_.instantiate(unknown_env);
    for (const auto& [var, c] : coeffs_) {
        CoefExpr value = c.instantiate(unknown_env);
        if (!value.is_zero()) out.coeffs_.emplace(var, value);
    }
    return out;
}

std::int64_t LinearPoly::eval(const std::map<std::string, std::int64_t>& unknown_env,
                              const std::map<std::string, std::int64_t>& var_env) const {
    std::int64_t total = constant_.eval(unknown_env);
    for (const auto& [var, c] : coeffs_) {
        auto it = var_env.find(var);
        if (it == var_env.end())
            throw std::runtime_error("unbound variable '" + var + "' in evaluation");
        total += c.eval(unknown_env) * it->second;
    }
    return total;
}

std::string LinearPoly::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    bool first = true;
    if (!constant_.is_zero()) {
        out += constant_.is_constant() ? constant_.to_string()
                                       : "(" + constant_.to_string() + ")";
        first = false;
    }
    for (const auto& [var, c] : coeffs_) {
        if (c.is_constant()) {
            std::int64_t value = c.constant_value();
            if (first) {
                if (value == -1)
                    out += "-";
                else if (value != 1)
                    out += std::to_string(value) + "*";
            } else {
                out += value < 0 ? " - " : " + ";
                std::int64_t mag = value < 0 ? -value : value;
                if (mag != 1) out += std::to_string(mag) + "*";
            }
            out += var;
        } else {
            if (!first) out += " + ";
            out += "(" + c.to_string() + ")*" + var;
        }
        first = false;
    }
    return out;
}

LinearPoly linearize(const TermPtr& t) {
    switch (t->kind()) {
        case Term::Kind::Variable:
            return LinearPoly::variable(t->var_name());
        case Term::Kind::Literal:
            return LinearPoly::constant(t->lit_value());
        case Term::Kind::Application:
            break;
    }
    const Symbol& sym = t->symbol();
    if (sym.kind != SymbolKind::Interpreted)
        throw std::runtime_error("cannot linearize uninterpreted symbol '" + sym.name + "'");
    if (sym.name == "0") return LinearPoly::constant(0);
    if (sym.name == "s") return linearize(t->args()[0]) + LinearPoly::constant(1);
    if (sym.name == "p") return linearize(t->args()[0]) - LinearPoly::constant(1);
    if (sym.name == "+") return linearize(t->args()[0]) + linearize(t->args()[1]);
    if (sym.name == "-") return linearize(t->args()[0]) - linearize(t->args()[1]);
    throw std::runtime_error("unknown interpreted symbol '" + sym.name + "'");
}

}  // namespace monoterm
