#include "monoterm/term.hpp"

#include <stdexcept>

namespace monoterm {

bool Symbol::is_marked() const {
    return !name.empty() && name.back() == '#';
}

bool Symbol::operator==(const Symbol& other) const {
    return name == other.name && arity == other.arity && kind == other.kind;
}

bool Symbol::operator<(const Symbol& other) const {
    if (name != other.name) return name < other.name;
    if (arity != other.arity) return arity < other.arity;
    return kind < other.kind;
}

Symbol make_marked(const Symbol& s) {
    if (s.is_marked())
        throw std::runtime_error("symbol '" + s.name + "' is already marked");
    return Symbol{s.name + "#", s.arity, SymbolKind::Uninterpreted};
}

Term::Term(Kind kind, std::string var_name, std::int64_t value, Symbol symbol,
           std::vector<TermPtr> args)
    : kind_(kind),
      var_name_(std::move(var_name)),
      value_(value),
      symbol_(std::move(symbol)),
      args_(std::move(args)) {}

TermPtr Term::var(std::string name) {
    if (name.empty()) throw std::runtime_error("empty variable name");
    return TermPtr(new Term(Kind::Variable, std::move(name), 0, Symbol{}, {}));
}

TermPtr Term::lit(std::int64_t value) {
    return TermPtr(new Term(Kind::Literal, {}, value, Symbol{}, {}));
}

TermPtr Term::app(Symbol symbol, std::vector<TermPtr> args) {
    if (static_cast<int>(args.size()) != symbol.arity)
        throw std::runtime_error("arity mismatch for symbol '" + symbol.name + "': expected " +
                                 std::to_string(symbol.arity) + " arguments, got " +
                                 std::to_string(args.size()));
    for (const auto& a : args)
        if (!a) throw std::runtime_error("null argument for symbol '" + symbol.name + "'");
    return TermPtr(new Term(Kind::Application, {}, 0, std::move(symbol), std::move(args)));
}

const std::string& Term::var_name() const {
    if (!is_var()) throw std::runtime_error("var_name on non-variable term");
    return var_name_;
}

std::int64_t Term::lit_value() const {
    if (!is_lit()) throw std::runtime_error("lit_value on non-literal term");
    return value_;
}

const Symbol& Term::symbol() const {
    if (!is_app()) throw std::runtime_error("symbol on non-application term");
    return symbol_;
}

const std::vector<TermPtr>& Term::args() const {
    if (!is_app()) throw std::runtime_error("args on non-application term");
    return args_;
}

bool equal_terms(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Term::Kind::Variable:
            return a->var_name() == b->var_name();
        case Term::Kind::Literal:
            return a->lit_value() == b->lit_value();
        case Term::Kind::Application: {
            if (a->symbol() != b->symbol()) return false;
            const auto& xs = a->args();
            const auto& ys = b->args();
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (!equal_terms(xs[i], ys[i])) return false;
            return true;
        }
    }
    return false;
}

namespace {

void collect_positions(const TermPtr& t, Position& here, std::vector<Position>& out) {
    out.push_back(here);
    if (t->is_app()) {
        const auto& args = t->args();
        for (std::size_t i = 0; i < args.size(); ++i) {
            here.push_back(static_cast<int>(i) + 1);
            collect_positions(args[i], here, out);
            here.pop_back();
        }
    }
}

}  // namespace

std::vector<Position> positions(const TermPtr& t) {
    std::vector<Position> out;
    Position here;
    collect_positions(t, here, out);
    return out;
}

TermPtr subterm_at(const TermPtr& t, const Position& p) {
    TermPtr cur = t;
    for (int idx : p) {
        if (!cur->is_app() || idx < 1 || idx > static_cast<int>(cur->args().size()))
            throw std::runtime_error("invalid position for term " + to_string(t));
        cur = cur->args()[idx - 1];
    }
    return cur;
}

TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& s) {
    if (p.empty()) return s;
    if (!t->is_app() || p.front() < 1 || p.front() > static_cast<int>(t->args().size()))
        throw std::runtime_error("invalid position for term " + to_string(t));
    auto args = t->args();
    Position rest(p.begin() + 1, p.end());
    args[p.front() - 1] = replace_at(args[p.front() - 1], rest, s);
    return Term::app(t->symbol(), std::move(args));
}

TermPtr apply_substitution(const TermPtr& t, const Substitution& sigma) {
    switch (t->kind()) {
        case Term::Kind::Variable: {
            auto it = sigma.find(t->var_name());
            return it == sigma.end() ? t : it->second;
        }
        case Term::Kind::Literal:
            return t;
        case Term::Kind::Application: {
            std::vector<TermPtr> args;
            args.reserve(t->args().size());
            bool changed = false;
            for (const auto& a : t->args()) {
                args.push_back(apply_substitution(a, sigma));
                changed = changed || args.back() != a;
            }
            return changed ? Term::app(t->symbol(), std::move(args)) : t;
        }
    }
    return t;
}

namespace {

bool match_into(const TermPtr& pattern, const TermPtr& subject, Substitution& sigma) {
    switch (pattern->kind()) {
        case Term::Kind::Variable: {
            auto [it, inserted] = sigma.emplace(pattern->var_name(), subject);
            return inserted || equal_terms(it->second, subject);
        }
        case Term::Kind::Literal:
            return subject->is_lit() && subject->lit_value() == pattern->lit_value();
        case Term::Kind::Application: {
            if (!subject->is_app() || subject->symbol() != pattern->symbol()) return false;
            const auto& ps = pattern->args();
            const auto& ss = subject->args();
            for (std::size_t i = 0; i < ps.size(); ++i)
                if (!match_into(ps[i], ss[i], sigma)) return false;
            return true;
        }
    }
    return false;
}

}  // namespace

std::optional<Substitution> match_term(const TermPtr& pattern, const TermPtr& subject) {
    Substitution sigma;
    if (!match_into(pattern, subject, sigma)) return std::nullopt;
    return sigma;
}

Substitution compose(const Substitution& first, const Substitution& second) {
    Substitution out;
    for (const auto& [x, t] : first) out.emplace(x, apply_substitution(t, second));
    for (const auto& [x, t] : second) out.emplace(x, t);
    return out;
}

namespace {

template <typename Pred>
bool all_subterms(const TermPtr& t, Pred&& keep) {
    if (!keep(t)) return false;
    if (t->is_app())
        for (const auto& a : t->args())
            if (!all_subterms(a, keep)) return false;
    return true;
}

}  // namespace

std::set<std::string> vars_of(const TermPtr& t) {
    std::set<std::string> out;
    all_subterms(t, [&](const TermPtr& s) {
        if (s->is_var()) out.insert(s->var_name());
        return true;
    });
    return out;
}

bool is_ground(const TermPtr& t) {
    return all_subterms(t, [](const TermPtr& s) { return !s->is_var(); });
}

bool is_interpreted_term(const TermPtr& t) {
    return all_subterms(t, [](const TermPtr& s) {
        return !s->is_app() || s->symbol().kind == SymbolKind::Interpreted;
    });
}

bool is_interpreted_term_over(const TermPtr& t, const std::set<std::string>& allowed) {
    return all_subterms(t, [&](const TermPtr& s) {
        if (s->is_var()) return allowed.count(s->var_name()) > 0;
        return !s->is_app() || s->symbol().kind == SymbolKind::Interpreted;
    });
}

bool is_interpreted_ground(const TermPtr& t) {
    return all_subterms(t, [](const TermPtr& s) {
        if (s->is_var()) return false;
        return !s->is_app() || s->symbol().kind == SymbolKind::Interpreted;
    });
}

bool contains_marked(const TermPtr& t) {
    return !all_subterms(t, [](const TermPtr& s) {
        return !s->is_app() || !s->symbol().is_marked();
    });
}

bool substitution_interpreted_on(const Substitution& sigma, const std::set<std::string>& vars) {
    for (const auto& x : vars) {
        auto it = sigma.find(x);
        if (it != sigma.end() && !is_interpreted_term(it->second)) return false;
    }
    return true;
}

namespace {

bool is_unary_chain_symbol(const TermPtr& t, const char* name) {
    return t->is_app() && t->symbol().kind == SymbolKind::Interpreted &&
           t->symbol().name == name && t->args().size() == 1;
}

void render(const TermPtr& t, std::string& out) {
    switch (t->kind()) {
        case Term::Kind::Variable:
            out += t->var_name();
            return;
        case Term::Kind::Literal:
            out += std::to_string(t->lit_value());
            return;
        case Term::Kind::Application:
            break;
    }
    const auto& sym = t->symbol();
    if (sym.kind == SymbolKind::Interpreted && sym.arity == 2 &&
        (sym.name == "+" || sym.name == "-")) {
        out += '(';
        render(t->args()[0], out);
        out += ' ';
        out += sym.name;
        out += ' ';
        render(t->args()[1], out);
        out += ')';
        return;
    }
    if (sym.kind == SymbolKind::Interpreted && (sym.name == "s" || sym.name == "p")) {
        int count = 0;
        TermPtr cur = t;
        while (is_unary_chain_symbol(cur, sym.name.c_str())) {
            ++count;
            cur = cur->args()[0];
        }
        if (count >= 2) {
            out += sym.name + "^" + std::to_string(count) + "(";
            render(cur, out);
            out += ')';
            return;
        }
    }
    out += sym.name;
    if (sym.arity == 0) return;
    out += '(';
    for (std::size_t i = 0; i < t->args().size(); ++i) {
        if (i > 0) out += ", ";
        render(t->args()[i], out);
    }
    out += ')';
}

}  // namespace

std::string to_string(const TermPtr& t) {
    std::string out;
    render(t, out);
    return out;
}

}  // namespace monoterm
