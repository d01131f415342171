#include "monoterm/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace monoterm {

namespace {

enum class Tok {
    Ident,
    Number,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Caret,
    Plus,
    Minus,
    Slash,
    Bang,
    EqOp,
    GtOp,
    GeOp,
    LtOp,
    LeOp,
    ImpliesOp,
    AndOp,
    OrOp,
};

struct Token {
    Tok kind;
    std::string text;
    long long value = 0;
    SourceLocation loc;
};

struct ParseFail {
    SourceLocation loc;
    std::string message;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex_line(const std::string& line, int line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    auto loc = [&](std::size_t at) { return SourceLocation{line_no, static_cast<int>(at) + 1}; };
    auto push = [&](Tok kind, std::size_t at, std::size_t len) {
        tokens.push_back({kind, line.substr(at, len), 0, loc(at)});
    };
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == ';') break;
        if (is_ident_start(c)) {
            std::size_t start = i;
            while (i < line.size() && is_ident_char(line[i])) ++i;
            push(Tok::Ident, start, i - start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
            Token tok{Tok::Number, line.substr(start, i - start), 0, loc(start)};
            try {
                tok.value = std::stoll(tok.text);
            } catch (const std::out_of_range&) {
                throw ParseFail{loc(start), "integer literal '" + tok.text + "' is out of range"};
            }
            tokens.push_back(tok);
            continue;
        }
        const std::string two = line.substr(i, 2);
        if (two == "->") {
            push(Tok::Arrow, i, 2);
        } else if (two == "=>") {
            push(Tok::ImpliesOp, i, 2);
        } else if (two == ">=") {
            push(Tok::GeOp, i, 2);
        } else if (two == "<=") {
            push(Tok::LeOp, i, 2);
        } else if (two == "/\\") {
            push(Tok::AndOp, i, 2);
        } else if (two == "\\/") {
            push(Tok::OrOp, i, 2);
        } else {
            switch (c) {
                case '(': push(Tok::LParen, i, 1); break;
                case ')': push(Tok::RParen, i, 1); break;
                case '[': push(Tok::LBracket, i, 1); break;
                case ']': push(Tok::RBracket, i, 1); break;
                case ',': push(Tok::Comma, i, 1); break;
                case '^': push(Tok::Caret, i, 1); break;
                case '+': push(Tok::Plus, i, 1); break;
                case '-': push(Tok::Minus, i, 1); break;
                case '/': push(Tok::Slash, i, 1); break;
                case '!': push(Tok::Bang, i, 1); break;
                case '=': push(Tok::EqOp, i, 1); break;
                case '>': push(Tok::GtOp, i, 1); break;
                case '<': push(Tok::LtOp, i, 1); break;
                default:
                    throw ParseFail{loc(i), std::string("unexpected character '") + c + "'"};
            }
            ++i;
            continue;
        }
        i += 2;
    }
    return tokens;
}

bool is_reserved_name(const std::string& name) {
    return name == "s" || name == "p" || name == "true" || name == "false" || name == "SIG";
}

class LineParser {
  public:
    LineParser(std::vector<Token> tokens, const std::map<std::string, Symbol>& declared)
        : tokens_(std::move(tokens)), declared_(declared) {}

    bool done() const { return pos_ >= tokens_.size(); }

    SourceLocation here() const {
        if (pos_ < tokens_.size()) return tokens_[pos_].loc;
        if (tokens_.empty()) return SourceLocation{0, 1};
        const Token& last = tokens_.back();
        return {last.loc.line, last.loc.column + static_cast<int>(last.text.size())};
    }

    const Token& peek() const {
        if (done()) throw ParseFail{here(), "unexpected end of line"};
        return tokens_[pos_];
    }

    bool at(Tok kind) const { return !done() && tokens_[pos_].kind == kind; }

    Token take() { return tokens_[pos_++]; }

    Token expect(Tok kind, const std::string& what) {
        if (!at(kind)) throw ParseFail{here(), "expected " + what};
        return take();
    }

    void expect_end() {
        if (!done()) throw ParseFail{here(), "unexpected trailing input '" + peek().text + "'"};
    }

    TermPtr parse_term() { return parse_sum(); }

    FormulaPtr parse_formula() { return parse_implies(); }

  private:
    const InterpretedSignature& sig_ = InterpretedSignature::instance();

    TermPtr parse_sum() {
        TermPtr t = parse_term_atom();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool plus = take().kind == Tok::Plus;
            TermPtr rhs = parse_term_atom();
            t = Term::app(plus ? sig_.plus : sig_.minus, {t, rhs});
        }
        return t;
    }

    TermPtr literal(long long value) {
        if (value == 0) return Term::app(sig_.zero, {});
        return Term::lit(value);
    }

    TermPtr parse_term_atom() {
        if (at(Tok::Number)) return literal(take().value);
        if (at(Tok::Minus)) {
            take();
            Token n = expect(Tok::Number, "an integer after '-'");
            return literal(-n.value);
        }
        if (at(Tok::LParen)) {
            take();
            TermPtr t = parse_sum();
            expect(Tok::RParen, "')'");
            return t;
        }
        Token name = expect(Tok::Ident, "a term");
        if (name.text == "true" || name.text == "false")
            throw ParseFail{name.loc, "'" + name.text + "' cannot appear in a term"};
        if (at(Tok::Caret)) {
            if (name.text != "s" && name.text != "p")
                throw ParseFail{name.loc, "'^' towers exist only for s and p"};
            take();
            Token n = expect(Tok::Number, "a tower height");
            const Symbol& step = name.text == "s" ? sig_.succ : sig_.pred;
            expect(Tok::LParen, "'('");
            TermPtr t = parse_sum();
            expect(Tok::RParen, "')'");
            for (long long k = 0; k < n.value; ++k) t = Term::app(step, {t});
            return t;
        }
        if (name.text == "s" || name.text == "p") {
            expect(Tok::LParen, "'(' after '" + name.text + "'");
            TermPtr arg = parse_sum();
            expect(Tok::RParen, "')'");
            return Term::app(name.text == "s" ? sig_.succ : sig_.pred, {arg});
        }
        auto decl = declared_.find(name.text);
        if (decl != declared_.end()) {
            std::vector<TermPtr> args;
            if (at(Tok::LParen)) {
                take();
                if (!at(Tok::RParen)) {
                    args.push_back(parse_sum());
                    while (at(Tok::Comma)) {
                        take();
                        args.push_back(parse_sum());
                    }
                }
                expect(Tok::RParen, "')'");
            }
            if (static_cast<int>(args.size()) != decl->second.arity)
                throw ParseFail{name.loc, "symbol '" + name.text + "' expects " +
                                              std::to_string(decl->second.arity) +
                                              " argument(s), got " + std::to_string(args.size())};
            return Term::app(decl->second, std::move(args));
        }
        if (at(Tok::LParen)) throw ParseFail{name.loc, "undeclared symbol '" + name.text + "'"};
        return Term::var(name.text);
    }

    FormulaPtr parse_implies() {
        FormulaPtr left = parse_or();
        if (at(Tok::ImpliesOp)) {
            take();
            return Formula::implication(left, parse_implies());
        }
        return left;
    }

    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (at(Tok::OrOp)) {
            take();
            f = Formula::disjunction(f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary();
        while (at(Tok::AndOp)) {
            take();
            f = Formula::conjunction(f, parse_unary());
        }
        return f;
    }

    FormulaPtr parse_unary() {
        if (at(Tok::Bang)) {
            take();
            return Formula::negation(parse_unary());
        }
        if (at(Tok::Ident) && peek().text == "true") {
            take();
            return Formula::top();
        }
        if (at(Tok::Ident) && peek().text == "false") {
            take();
            return Formula::bottom();
        }
        if (at(Tok::LParen)) {
            std::size_t save = pos_;
            try {
                take();
                FormulaPtr f = parse_implies();
                expect(Tok::RParen, "')'");
                return f;
            } catch (const ParseFail&) {
                pos_ = save;
            }
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        TermPtr lhs = parse_sum();
        if (done()) throw ParseFail{here(), "expected a predicate"};
        Token op = take();
        TermPtr rhs;
        switch (op.kind) {
            case Tok::EqOp: rhs = parse_sum(); return Formula::atom(lhs, Pred::Eq, rhs);
            case Tok::GtOp: rhs = parse_sum(); return Formula::atom(lhs, Pred::Gt, rhs);
            case Tok::GeOp: rhs = parse_sum(); return Formula::atom(lhs, Pred::Ge, rhs);
            case Tok::LtOp: rhs = parse_sum(); return Formula::atom(rhs, Pred::Gt, lhs);
            case Tok::LeOp: rhs = parse_sum(); return Formula::atom(rhs, Pred::Ge, lhs);
            default: throw ParseFail{op.loc, "expected a predicate, got '" + op.text + "'"};
        }
    }

    std::vector<Token> tokens_;
    const std::map<std::string, Symbol>& declared_;
    std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_ctrs_text(const std::string& text) {
    ParseResult result;
    CtrsDocument doc;
    std::map<std::string, Symbol> declared;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        try {
            auto tokens = lex_line(line, line_no);
            if (tokens.empty()) continue;
            LineParser parser(std::move(tokens), declared);
            if (parser.at(Tok::Ident) && parser.peek().text == "SIG") {
                parser.take();
                bool any = false;
                while (!parser.done()) {
                    Token name = parser.expect(Tok::Ident, "a symbol name");
                    if (is_reserved_name(name.text))
                        throw ParseFail{name.loc, "'" + name.text + "' is a reserved name"};
                    parser.expect(Tok::Slash, "'/'");
                    Token arity = parser.expect(Tok::Number, "an arity");
                    if (declared.count(name.text))
                        throw ParseFail{name.loc, "duplicate declaration of '" + name.text + "'"};
                    Symbol sym{name.text, static_cast<int>(arity.value),
                               SymbolKind::Uninterpreted};
                    declared.emplace(name.text, sym);
                    doc.trs.signature.push_back(sym);
                    any = true;
                }
                if (!any) throw ParseFail{parser.here(), "expected a declaration after SIG"};
                continue;
            }
            SourceLocation start = parser.here();
            TermPtr lhs = parser.parse_term();
            parser.expect(Tok::Arrow, "'->'");
            TermPtr rhs = parser.parse_term();
            FormulaPtr constraint = Formula::top();
            if (parser.at(Tok::LBracket)) {
                parser.take();
                constraint = parser.parse_formula();
                parser.expect(Tok::RBracket, "']'");
            }
            parser.expect_end();
            ConstrainedRule rule{static_cast<int>(doc.trs.rules.size()) + 1, lhs, rhs,
                                 constraint};
            try {
                check_rule_wellformed(rule);
            } catch (const std::runtime_error& e) {
                result.diagnostics.push_back({start, e.what()});
                continue;
            }
            doc.trs.rules.push_back(std::move(rule));
            doc.rule_locations.push_back(start);
        } catch (const ParseFail& fail) {
            result.diagnostics.push_back({fail.loc, fail.message});
        }
    }
    if (result.diagnostics.empty()) result.document = std::move(doc);
    return result;
}

ParseResult parse_ctrs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult result;
        result.diagnostics.push_back({{0, 0}, "cannot read file '" + path + "'"});
        return result;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_ctrs_text(buffer.str());
}

std::string print_ctrs(const CtrsDocument& doc) {
    std::string out;
    if (!doc.trs.signature.empty()) {
        out += "SIG";
        for (const auto& sym : doc.trs.signature)
            out += " " + sym.name + "/" + std::to_string(sym.arity);
        out += "\n";
    }
    for (const auto& rule : doc.trs.rules) out += to_string(rule) + "\n";
    return out;
}

std::string to_string(const Diagnostic& diagnostic) {
    return "line " + std::to_string(diagnostic.location.line) + ", column " +
           std::to_string(diagnostic.location.column) + ": " + diagnostic.message;
}

}  // namespace monoterm
