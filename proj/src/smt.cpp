#include "monoterm/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

namespace monoterm::smt {

namespace {

ExprPtr make(Expr::Kind kind, std::int64_t value, std::string name,
             std::vector<ExprPtr> operands, std::vector<std::string> bound = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->value = value;
    e->name = std::move(name);
    e->operands = std::move(operands);
    e->bound = std::move(bound);
    return e;
}

void require_operands(const std::vector<ExprPtr>& operands) {
    for (const auto& op : operands)
        if (!op) throw std::runtime_error("null operand in smt expression");
}

}  // namespace

ExprPtr int_const(std::int64_t value) { return make(Expr::Kind::IntConst, value, {}, {}); }

ExprPtr bool_const(bool value) { return make(Expr::Kind::BoolConst, value ? 1 : 0, {}, {}); }

ExprPtr sym(std::string name) {
    if (name.empty()) throw std::runtime_error("empty smt symbol");
    return make(Expr::Kind::Sym, 0, std::move(name), {});
}

ExprPtr add(std::vector<ExprPtr> operands) {
    require_operands(operands);
    if (operands.empty()) return int_const(0);
    if (operands.size() == 1) return operands.front();
    return make(Expr::Kind::Add, 0, {}, std::move(operands));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Sub, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr neg(ExprPtr a) {
    require_operands({a});
    return make(Expr::Kind::Neg, 0, {}, {std::move(a)});
}

ExprPtr mul(std::vector<ExprPtr> operands) {
    require_operands(operands);
    if (operands.empty()) return int_const(1);
    if (operands.size() == 1) return operands.front();
    return make(Expr::Kind::Mul, 0, {}, std::move(operands));
}

ExprPtr eq(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Eq, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr ge(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Ge, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr gt(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Gt, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr le(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Le, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr lt(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Lt, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr logical_not(ExprPtr a) {
    require_operands({a});
    return make(Expr::Kind::Not, 0, {}, {std::move(a)});
}

ExprPtr logical_and(std::vector<ExprPtr> operands) {
    require_operands(operands);
    if (operands.empty()) return bool_const(true);
    if (operands.size() == 1) return operands.front();
    return make(Expr::Kind::And, 0, {}, std::move(operands));
}

ExprPtr logical_or(std::vector<ExprPtr> operands) {
    require_operands(operands);
    if (operands.empty()) return bool_const(false);
    if (operands.size() == 1) return operands.front();
    return make(Expr::Kind::Or, 0, {}, std::move(operands));
}

ExprPtr implies(ExprPtr a, ExprPtr b) {
    require_operands({a, b});
    return make(Expr::Kind::Implies, 0, {}, {std::move(a), std::move(b)});
}

ExprPtr forall(std::vector<std::string> bound, ExprPtr body) {
    require_operands({body});
    if (bound.empty()) return body;
    return make(Expr::Kind::Forall, 0, {}, {std::move(body)}, std::move(bound));
}

std::string to_string(Status status) {
    switch (status) {
        case Status::Sat: return "sat";
        case Status::Unsat: return "unsat";
        case Status::Unknown: return "unknown";
        case Status::Timeout: return "timeout";
    }
    return "unknown";
}

namespace {

void render_expr(const ExprPtr& e, std::string& out) {
    switch (e->kind) {
        case Expr::Kind::IntConst:
            if (e->value < 0)
                out += "(- " + std::to_string(-e->value) + ")";
            else
                out += std::to_string(e->value);
            return;
        case Expr::Kind::BoolConst:
            out += e->value ? "true" : "false";
            return;
        case Expr::Kind::Sym:
            out += e->name;
            return;
        case Expr::Kind::Forall: {
            out += "(forall (";
            for (std::size_t i = 0; i < e->bound.size(); ++i) {
                if (i > 0) out += ' ';
                out += "(" + e->bound[i] + " Int)";
            }
            out += ") ";
            render_expr(e->operands[0], out);
            out += ")";
            return;
        }
        default:
            break;
    }
    static const std::map<Expr::Kind, const char*> ops = {
        {Expr::Kind::Add, "+"},     {Expr::Kind::Sub, "-"},     {Expr::Kind::Neg, "-"},
        {Expr::Kind::Mul, "*"},     {Expr::Kind::Eq, "="},      {Expr::Kind::Ge, ">="},
        {Expr::Kind::Gt, ">"},      {Expr::Kind::Le, "<="},     {Expr::Kind::Lt, "<"},
        {Expr::Kind::Not, "not"},   {Expr::Kind::And, "and"},   {Expr::Kind::Or, "or"},
        {Expr::Kind::Implies, "=>"}};
    out += "(";
    out += ops.at(e->kind);
    for (const auto& op : e->operands) {
        out += ' ';
        render_expr(op, out);
    }
    out += ")";
}

void collect_free(const ExprPtr& e, std::set<std::string>& bound_here,
                  std::set<std::string>& free) {
    switch (e->kind) {
        case Expr::Kind::Sym:
            if (!bound_here.count(e->name)) free.insert(e->name);
            return;
        case Expr::Kind::Forall: {
            std::vector<std::string> added;
            for (const auto& v : e->bound)
                if (bound_here.insert(v).second) added.push_back(v);
            collect_free(e->operands[0], bound_here, free);
            for (const auto& v : added) bound_here.erase(v);
            return;
        }
        default:
            for (const auto& op : e->operands) collect_free(op, bound_here, free);
            return;
    }
}

}  // namespace

std::string emit_smtlib(const ConstraintSystem& cs) {
    std::set<std::string> declared;
    for (const auto& u : cs.int_unknowns)
        if (!declared.insert(u).second)
            throw std::runtime_error("duplicate unknown declaration '" + u + "'");
    for (const auto& u : cs.bool_unknowns)
        if (!declared.insert(u).second)
            throw std::runtime_error("duplicate unknown declaration '" + u + "'");

    std::set<std::string> free;
    for (const auto& a : cs.assertions) {
        if (!a) throw std::runtime_error("null assertion");
        std::set<std::string> bound_here;
        collect_free(a, bound_here, free);
    }
    for (const auto& name : free)
        if (!declared.count(name))
            throw std::runtime_error("assertion uses undeclared symbol '" + name + "'");

    std::string out;
    for (const auto& note : cs.notes) out += "; " + note + "\n";
    out += "(set-logic " + cs.logic + ")\n";
    for (const auto& u : cs.int_unknowns) out += "(declare-fun " + u + " () Int)\n";
    for (const auto& u : cs.bool_unknowns) out += "(declare-fun " + u + " () Bool)\n";
    for (const auto& a : cs.assertions) {
        out += "(assert ";
        render_expr(a, out);
        out += ")\n";
    }
    out += "(check-sat)\n";
    if (cs.want_model) out += "(get-model)\n";
    return out;
}

namespace {

struct RawResult {
    std::string out;
    std::string err;
    bool deadline_hit = false;
    int exit_code = -1;
};

RawResult run_process(const std::string& command, const std::string& input,
                      double timeout_secs) {
    signal(SIGPIPE, SIG_IGN);

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw ProtocolError("failed to create pipes for solver process");

    pid_t pid = fork();
    if (pid < 0) throw ProtocolError("failed to fork solver process");
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0],
                       err_pipe[1]})
            close(fd);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);

    RawResult result;
    std::size_t written = 0;
    bool stdin_open = true, stdout_open = true, stderr_open = true;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds(static_cast<long>(timeout_secs * 1000));
    bool has_deadline = timeout_secs > 0;
    char buffer[65536];

    while (stdout_open || stderr_open || stdin_open) {
        std::vector<pollfd> fds;
        if (stdin_open) fds.push_back({in_pipe[1], POLLOUT, 0});
        if (stdout_open) fds.push_back({out_pipe[0], POLLIN, 0});
        if (stderr_open) fds.push_back({err_pipe[0], POLLIN, 0});

        int wait_ms = 1000;
        if (has_deadline) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
            if (left <= 0) {
                result.deadline_hit = true;
                break;
            }
            wait_ms = static_cast<int>(std::min<long long>(left, 1000));
        }

        int rc = poll(fds.data(), fds.size(), wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (const auto& fd : fds) {
            if (fd.fd == in_pipe[1] && (fd.revents & (POLLOUT | POLLERR | POLLHUP))) {
                if (fd.revents & (POLLERR | POLLHUP)) {
                    close(in_pipe[1]);
                    stdin_open = false;
                    continue;
                }
                ssize_t n = write(in_pipe[1], input.data() + written,
                                  std::min<std::size_t>(input.size() - written, 32768));
                if (n > 0) written += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN && errno != EINTR) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
                if (written >= input.size() && stdin_open) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
            } else if (fd.revents & (POLLIN | POLLHUP)) {
                ssize_t n = read(fd.fd, buffer, sizeof buffer);
                if (n > 0) {
                    (fd.fd == out_pipe[0] ? result.out : result.err)
                        .append(buffer, static_cast<std::size_t>(n));
                } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                    close(fd.fd);
                    (fd.fd == out_pipe[0] ? stdout_open : stderr_open) = false;
                }
            }
        }
    }

    if (stdin_open) close(in_pipe[1]);
    if (result.deadline_hit) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
    }
    if (stdout_open) {
        ssize_t n;
        while ((n = read(out_pipe[0], buffer, sizeof buffer)) > 0)
            result.out.append(buffer, static_cast<std::size_t>(n));
        close(out_pipe[0]);
    }
    if (stderr_open) close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

std::vector<std::string> tokenize_sexpr(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    bool in_string = false;
    for (char c : text) {
        if (in_string) {
            if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
            continue;
        }
        if (c == '(' || c == ')') {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
            tokens.push_back(std::string(1, c));
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::optional<std::int64_t> parse_numeral(const std::vector<std::string>& tokens,
                                          std::size_t& i) {
    if (i >= tokens.size()) return std::nullopt;
    if (tokens[i] == "(") {
        if (i + 3 < tokens.size() && tokens[i + 1] == "-" && tokens[i + 3] == ")") {
            try {
                std::int64_t v = -std::stoll(tokens[i + 2]);
                i += 4;
                return v;
            } catch (...) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(tokens[i], &used);
        if (used != tokens[i].size()) return std::nullopt;
        ++i;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

Model parse_model(const std::vector<std::string>& tokens) {
    Model model;
    for (std::size_t i = 0; i + 5 < tokens.size(); ++i) {
        if (tokens[i] != "(" || tokens[i + 1] != "define-fun") continue;
        const std::string& name = tokens[i + 2];
        if (tokens[i + 3] != "(" || tokens[i + 4] != ")") continue;
        const std::string& sort = tokens[i + 5];
        std::size_t after = i + 6;
        if (sort == "Int") {
            auto v = parse_numeral(tokens, after);
            if (v) model.ints[name] = *v;
        } else if (sort == "Bool" && after < tokens.size()) {
            if (tokens[after] == "true") model.bools[name] = true;
            else if (tokens[after] == "false") model.bools[name] = false;
        }
    }
    return model;
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    for (char c : label)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "query" : out;
}

SolverVerdict check_once(const ConstraintSystem& cs, const SolverConfig& cfg,
                         const std::string& label, double timeout_secs) {
    ConstraintSystem to_run = cs;
    if (!cfg.force_logic.empty()) to_run.logic = cfg.force_logic;
    std::string script = emit_smtlib(to_run);

    if (!cfg.dump_dir.empty()) {
        std::filesystem::create_directories(cfg.dump_dir);
        std::ofstream file(std::filesystem::path(cfg.dump_dir) /
                           (sanitize_label(label) + ".smt2"));
        file << script;
    }

    auto start = std::chrono::steady_clock::now();
    RawResult raw = run_process(cfg.command, script, timeout_secs);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    SolverVerdict verdict;
    verdict.seconds = seconds;
    if (raw.deadline_hit) {
        verdict.status = Status::Timeout;
        return verdict;
    }

    auto tokens = tokenize_sexpr(raw.out);
    std::optional<Status> status;
    std::size_t status_pos = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "sat") status = Status::Sat;
        else if (tokens[i] == "unsat") status = Status::Unsat;
        else if (tokens[i] == "unknown") status = Status::Unknown;
        else if (tokens[i] == "timeout") status = Status::Timeout;
        else continue;
        status_pos = i;
        break;
    }
    if (!status) {
        std::string detail = raw.err.empty() ? raw.out : raw.err;
        if (detail.size() > 400) detail = detail.substr(0, 400) + "...";
        throw ProtocolError("solver command '" + cfg.command +
                            "' produced no status token (exit code " +
                            std::to_string(raw.exit_code) + "): " + detail);
    }
    verdict.status = *status;
    if (verdict.status == Status::Sat && cs.want_model) {
        std::vector<std::string> rest(tokens.begin() + status_pos + 1, tokens.end());
        Model model = parse_model(rest);
        for (const auto& u : cs.int_unknowns) model.ints.emplace(u, 0);
        for (const auto& u : cs.bool_unknowns) model.bools.emplace(u, false);
        verdict.model = std::move(model);
    }
    return verdict;
}

}  // namespace

SolverVerdict check(const ConstraintSystem& cs, const SolverConfig& cfg,
                    const std::string& label) {
    SolverVerdict verdict = check_once(cs, cfg, label, cfg.timeout_secs);
    if (verdict.status == Status::Unknown && cfg.retry_on_unknown) {
        SolverVerdict retry =
            check_once(cs, cfg, label + "_retry", cfg.timeout_secs * cfg.retry_factor);
        retry.seconds += verdict.seconds;
        return retry;
    }
    return verdict;
}

std::int64_t eval_int(const ExprPtr& e, const Env& env) {
    switch (e->kind) {
        case Expr::Kind::IntConst:
            return e->value;
        case Expr::Kind::Sym: {
            auto it = env.ints.find(e->name);
            if (it == env.ints.end())
                throw std::runtime_error("unbound int symbol '" + e->name + "'");
            return it->second;
        }
        case Expr::Kind::Add: {
            std::int64_t total = 0;
            for (const auto& op : e->operands) total += eval_int(op, env);
            return total;
        }
        case Expr::Kind::Sub:
            return eval_int(e->operands[0], env) - eval_int(e->operands[1], env);
        case Expr::Kind::Neg:
            return -eval_int(e->operands[0], env);
        case Expr::Kind::Mul: {
            std::int64_t total = 1;
            for (const auto& op : e->operands) total *= eval_int(op, env);
            return total;
        }
        default:
            throw std::runtime_error("expected integer smt expression");
    }
}

bool eval_bool(const ExprPtr& e, const Env& env) {
    switch (e->kind) {
        case Expr::Kind::BoolConst:
            return e->value != 0;
        case Expr::Kind::Sym: {
            auto it = env.bools.find(e->name);
            if (it == env.bools.end())
                throw std::runtime_error("unbound bool symbol '" + e->name + "'");
            return it->second;
        }
        case Expr::Kind::Eq:
            return eval_int(e->operands[0], env) == eval_int(e->operands[1], env);
        case Expr::Kind::Ge:
            return eval_int(e->operands[0], env) >= eval_int(e->operands[1], env);
        case Expr::Kind::Gt:
            return eval_int(e->operands[0], env) > eval_int(e->operands[1], env);
        case Expr::Kind::Le:
            return eval_int(e->operands[0], env) <= eval_int(e->operands[1], env);
        case Expr::Kind::Lt:
            return eval_int(e->operands[0], env) < eval_int(e->operands[1], env);
        case Expr::Kind::Not:
            return !eval_bool(e->operands[0], env);
        case Expr::Kind::And:
            for (const auto& op : e->operands)
                if (!eval_bool(op, env)) return false;
            return true;
        case Expr::Kind::Or:
            for (const auto& op : e->operands)
                if (eval_bool(op, env)) return true;
            return false;
        case Expr::Kind::Implies:
            return !eval_bool(e->operands[0], env) || eval_bool(e->operands[1], env);
        default:
            throw std::runtime_error("expected boolean smt expression");
    }
}

namespace {

bool check_tree(const ExprPtr& e, Env& env, std::int64_t lo, std::int64_t hi);

bool grid_check(const ExprPtr& body, const std::vector<std::string>& bound, std::size_t index,
                Env& env, std::int64_t lo, std::int64_t hi, std::int64_t stride) {
    if (index == bound.size()) return check_tree(body, env, lo, hi);
    for (std::int64_t v = lo;; v += stride) {
        if (v > hi) v = hi;
        env.ints[bound[index]] = v;
        bool ok = grid_check(body, bound, index + 1, env, lo, hi, stride);
        env.ints.erase(bound[index]);
        if (!ok) return false;
        if (v == hi) break;
    }
    return true;
}

/// Walks the boolean skeleton so quantifiers nested under connectives (the
/// guard implications the condition builder emits) get grid-sampled too.
bool check_tree(const ExprPtr& e, Env& env, std::int64_t lo, std::int64_t hi) {
    switch (e->kind) {
        case Expr::Kind::Forall: {
            std::int64_t stride = 1;
            if (e->bound.size() == 2) stride = 5;
            if (e->bound.size() >= 3) stride = 25;
            return grid_check(e->operands[0], e->bound, 0, env, lo, hi, stride);
        }
        case Expr::Kind::Not:
            return !check_tree(e->operands[0], env, lo, hi);
        case Expr::Kind::And:
            for (const auto& op : e->operands)
                if (!check_tree(op, env, lo, hi)) return false;
            return true;
        case Expr::Kind::Or:
            for (const auto& op : e->operands)
                if (check_tree(op, env, lo, hi)) return true;
            return false;
        case Expr::Kind::Implies:
            return !check_tree(e->operands[0], env, lo, hi) ||
                   check_tree(e->operands[1], env, lo, hi);
        default:
            return eval_bool(e, env);
    }
}

}  // namespace

std::optional<std::string> find_model_violation(const ConstraintSystem& cs, const Model& model,
                                                std::int64_t lo, std::int64_t hi) {
    Env env{model.ints, model.bools};
    for (std::size_t i = 0; i < cs.assertions.size(); ++i) {
        const auto& a = cs.assertions[i];
        bool ok = check_tree(a, env, lo, hi);
        if (!ok) {
            std::string text;
            render_expr(a, text);
            if (text.size() > 200) text = text.substr(0, 200) + "...";
            return "assertion " + std::to_string(i + 1) + " violated: " + text;
        }
    }
    return std::nullopt;
}

}  // namespace monoterm::smt
