#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoterm/ctrs.hpp"
#include "monoterm/dp.hpp"
#include "monoterm/parser.hpp"
#include "monoterm/polyinterp.hpp"
#include "monoterm/smt.hpp"

using namespace monoterm;

// Each criterion accumulates into `ok` and ends with report(), so the binary
// prints exactly one pass/fail line per criterion.
#define ACCEPT(expr)                                  \
    do {                                              \
        bool accept_result_ = static_cast<bool>(expr); \
        CHECK(accept_result_);                        \
        ok = ok && accept_result_;                    \
    } while (0)

namespace {

void report(int number, bool ok, const char* label) {
    std::printf("criterion %d: %s - %s\n", number, ok ? "pass" : "fail", label);
    std::fflush(stdout);
}

CtrsDocument load_corpus(const std::string& name) {
    auto result = parse_ctrs_file(std::string(MONOTERM_CORPUS_DIR) + "/" + name + ".ctrs");
    for (const auto& d : result.diagnostics) INFO(to_string(d));
    REQUIRE(result.ok());
    return *result.document;
}

DPProblem core_of(const ConstrainedTRS& trs) {
    auto outcome = scc_processor(initial_problem(trs));
    REQUIRE(outcome.subproblems.size() == 1);
    return outcome.subproblems[0];
}

DPProblem keep_only(const DPProblem& problem, const std::vector<int>& ids) {
    DPProblem out;
    out.system = problem.system;
    std::set<int> wanted(ids.begin(), ids.end());
    for (const auto& pair : problem.pairs)
        if (wanted.count(pair.id)) out.pairs.push_back(pair);
    return out;
}

TermPtr zero() { return Term::app(InterpretedSignature::instance().zero, {}); }

TermPtr s_tower(TermPtr base, int n) {
    for (int i = 0; i < n; ++i) base = Term::app(InterpretedSignature::instance().succ, {base});
    return base;
}

Symbol plain(const std::string& name, int arity) {
    return Symbol{name, arity, SymbolKind::Uninterpreted};
}

smt::SolverConfig solver_config(double timeout) {
    smt::SolverConfig config;
    config.timeout_secs = timeout;
    return config;
}

PIAssignment assignment_from(const std::map<std::string, std::vector<long long>>& interps) {
    const auto& sig = InterpretedSignature::instance();
    PIAssignment pi;
    for (const auto& [name, coeffs] : interps) {
        int arity = static_cast<int>(coeffs.size()) - 1;
        Symbol symbol;
        if (name.size() > 1 && name.back() == '#') {
            std::string base = name.substr(0, name.size() - 1);
            if (auto found = sig.find(base, arity))
                symbol = make_marked(*found);
            else
                symbol = make_marked(plain(base, arity));
        } else {
            symbol = plain(name, arity);
        }
        pi.interps[symbol] = concrete_interp({coeffs.begin(), coeffs.end()});
    }
    return pi;
}

PinnedModel pinned(std::map<std::string, std::vector<long long>> interps, long long c0) {
    PinnedModel model;
    model.interpretations = std::move(interps);
    model.c0 = c0;
    return model;
}

const std::vector<std::string> kSystems = {"mccarthy", "mccarthy_small", "ackermann",
                                           "ackermann_total", "nest", "nest_shifted",
                                           "nest_pair"};

const std::vector<std::pair<std::string, PiKind>> kColumns = {
    {"legacy", PiKind::Legacy},
    {"pi:gt-ge-ge", PiKind::GtGeGe},
    {"pi:lt-ge-le", PiKind::LtGeLe},
    {"pi:gt-le-le", PiKind::GtLeLe},
    {"pi:lt-le-ge", PiKind::LtLeGe}};

struct Cell {
    std::string system;
    std::string column;
    PiKind kind = PiKind::Legacy;
    FrameworkResult result;
    std::vector<smt::ConstraintSystem> sat_systems;
    std::vector<smt::Model> sat_models;

    bool proved() const { return result.proved(); }
};

struct Matrix {
    std::map<std::string, CtrsDocument> documents;
    std::vector<Cell> cells;

    const Cell& at(const std::string& system, const std::string& column) const {
        for (const auto& cell : cells)
            if (cell.system == system && cell.column == column) return cell;
        throw std::runtime_error("no cell " + system + " / " + column);
    }
};

/// The 35-cell verdict matrix, computed once and shared by the criteria
/// that consume verdicts, solver models, or proof records.
const Matrix& matrix() {
    static Matrix cached = [] {
        Matrix m;
        for (const auto& name : kSystems) m.documents.emplace(name, load_corpus(name));
        for (const auto& name : kSystems) {
            for (const auto& [column, kind] : kColumns) {
                Cell cell;
                cell.system = name;
                cell.column = column;
                cell.kind = kind;
                auto services = std::make_shared<PiServices>(solver_config(60.0));
                services->on_check = [&cell](const smt::ConstraintSystem& cs,
                                             const smt::SolverVerdict& verdict) {
                    if (verdict.status == smt::Status::Sat && verdict.model) {
                        cell.sat_systems.push_back(cs);
                        cell.sat_models.push_back(*verdict.model);
                    }
                };
                auto strategy = build_strategy("scc," + column, services);
                cell.result = run_framework(m.documents.at(name).trs, strategy, 64);
                m.cells.push_back(std::move(cell));
            }
        }
        return m;
    }();
    return cached;
}

const std::map<std::string, std::set<std::string>> kProvedCells = {
    {"legacy", {"ackermann", "ackermann_total"}},
    {"pi:gt-le-le", {"mccarthy", "mccarthy_small"}},
    {"pi:lt-le-ge", {"mccarthy", "mccarthy_small"}},
    {"pi:gt-ge-ge", {"nest", "nest_shifted", "nest_pair"}},
    {"pi:lt-ge-le", {"nest", "nest_shifted", "nest_pair"}}};

// The synthesis question for the increasing-rule kinds on ackermann is a
// hard unsatisfiable instance; any failure mode is acceptable there.
bool timeout_tolerated(const std::string& system, const std::string& column) {
    return system == "ackermann" && (column == "pi:gt-ge-ge" || column == "pi:lt-ge-le");
}

std::vector<std::string> golden_lines(const std::string& name) {
    std::ifstream in(std::string(MONOTERM_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("criterion 1") {
    bool ok = true;
    for (const auto& cell : matrix().cells) {
        CAPTURE(cell.system);
        CAPTURE(cell.column);
        bool expected_proved = kProvedCells.at(cell.column).count(cell.system) != 0;
        if (expected_proved)
            ACCEPT(cell.proved());
        else if (timeout_tolerated(cell.system, cell.column))
            ACCEPT(!cell.proved());
        else
            ACCEPT(!cell.proved() && !cell.result.budget_exhausted);
    }

    std::ifstream in(std::string(MONOTERM_CORPUS_DIR) + "/expected.json");
    ACCEPT(in.good());
    auto expected = nlohmann::json::parse(in);
    for (const auto& cell : matrix().cells) {
        CAPTURE(cell.system);
        CAPTURE(cell.column);
        ACCEPT(expected["systems"][cell.system][cell.column] ==
               to_string(cell.result.verdict));
    }
    report(1, ok, "corpus verdict matrix");
}

TEST_CASE("criterion 2") {
    bool ok = true;
    auto start = std::chrono::steady_clock::now();

    auto doc = load_corpus("mccarthy");
    auto core = core_of(doc.trs);
    PIAssignment pi = assignment_from(
        {{"f", {-10, 1}}, {"f#", {-1, -1}}, {"s#", {0, 0}}, {"p#", {0, 0}}});
    ValidityOracle oracle;
    auto verified = verify_model(core, PiKind::GtLeLe, pi, -101, oracle);
    CAPTURE(verified.rejection);
    ACCEPT(verified.accepted);
    ACCEPT(verified.classification.strict_pairs == std::vector<int>({1, 2}));
    ACCEPT(verified.classification.bounded_pairs == std::vector<int>({1, 2}));

    auto services = std::make_shared<PiServices>(solver_config(60.0));
    services->pinned.push_back(pinned({{"f", {-10, 1}}, {"f#", {-1, -1}}}, -101));
    auto outcome = pi_processor(core, PiKind::GtLeLe, *services);
    ACCEPT(outcome.subproblems.size() == 1);
    ACCEPT(!outcome.subproblems.empty() && outcome.subproblems[0].trivial());

    services->pinned.push_back(pinned({{"f", {-10, 1}}, {"f#", {-1, -1}}}, -101));
    auto framework = run_framework(doc.trs, build_strategy("scc,pi:gt-le-le", services), 64);
    ACCEPT(framework.proved());
    ACCEPT(services->checks_issued == 0);

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CAPTURE(secs);
    ACCEPT(secs < 5.0);
    report(2, ok, "published mccarthy model verifies and finishes the proof");
}

TEST_CASE("criterion 3") {
    bool ok = true;
    auto core = core_of(load_corpus("mccarthy").trs);
    for (auto kind : {PiKind::GtGeGe, PiKind::LtGeLe}) {
        CAPTURE(to_string(kind));
        auto built = build_conditions(core, kind);
        ACCEPT(!built.structurally_infeasible);
        auto start = std::chrono::steady_clock::now();
        auto verdict =
            smt::check(built.system, solver_config(60.0), "acceptance" + variant_suffix(kind));
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        CAPTURE(secs);
        ACCEPT(verdict.status == smt::Status::Unsat);
        ACCEPT(secs <= 60.0);
    }
    report(3, ok, "increasing-rule kinds are unsatisfiable on the mccarthy core");
}

TEST_CASE("criterion 4") {
    bool ok = true;
    auto mccarthy = compute_dependency_pairs(load_corpus("mccarthy").trs);
    auto ackermann = compute_dependency_pairs(load_corpus("ackermann").trs);
    ACCEPT(mccarthy.size() == 23);
    ACCEPT(ackermann.size() == 8);

    auto check_golden = [&](const std::vector<DependencyPair>& pairs, const std::string& name) {
        auto lines = golden_lines(name);
        ACCEPT(lines.size() == pairs.size());
        for (std::size_t i = 0; i < pairs.size() && i < lines.size(); ++i) {
            CAPTURE(lines[i]);
            ACCEPT(std::to_string(pairs[i].id) + ": " + to_string(pairs[i]) == lines[i]);
        }
    };
    check_golden(mccarthy, "mccarthy.dps.txt");
    check_golden(ackermann, "ackermann.dps.txt");
    report(4, ok, "dependency pair counts and shapes");
}

TEST_CASE("criterion 5") {
    bool ok = true;
    auto mccarthy = scc_processor(initial_problem(load_corpus("mccarthy").trs));
    ACCEPT(mccarthy.subproblems.size() == 1);
    ACCEPT(mccarthy.subproblems.at(0).pair_ids() == std::vector<int>({1, 2}));

    auto ackermann = scc_processor(initial_problem(load_corpus("ackermann").trs));
    ACCEPT(ackermann.subproblems.size() == 1);
    ACCEPT(ackermann.subproblems.at(0).pair_ids() == std::vector<int>({2, 5, 7}));
    report(5, ok, "cyclic cores of the dependency graphs");
}

TEST_CASE("criterion 6") {
    bool ok = true;
    auto doc = load_corpus("ackermann");
    auto services = std::make_shared<PiServices>(solver_config(60.0));
    services->pinned.push_back(pinned({{"ack#", {0, 1, 0}}}, 0));
    services->pinned.push_back(pinned({{"ack#", {0, 0, 1}}}, 1));

    auto result = run_framework(doc.trs, build_strategy("scc,legacy", services), 64);
    ACCEPT(result.proved());
    ACCEPT(services->checks_issued == 0);

    int legacy_applications = 0;
    for (const auto& attempt : result.attempts)
        if (attempt.progressed && attempt.justification.processor == "legacy-pi")
            ++legacy_applications;
    ACCEPT(legacy_applications == 2);
    ACCEPT(result.applications == 3);

    const ProofNode* root = result.root.get();
    ACCEPT(root != nullptr && root->children.size() == 1);
    const ProofNode* scc_core = root->children.at(0).get();
    ACCEPT(scc_core->problem.pair_ids() == std::vector<int>({2, 5, 7}));
    ACCEPT(scc_core->application &&
           scc_core->application->interpretations.at("ack#") ==
               std::vector<long long>({0, 1, 0}));

    const ProofNode* intermediate = nullptr;
    for (const auto& child : scc_core->children)
        if (!child->problem.trivial()) intermediate = child.get();
    ACCEPT(intermediate != nullptr);
    if (intermediate) {
        ACCEPT(intermediate->problem.pair_ids() == std::vector<int>({7}));
        ACCEPT(intermediate->application &&
               intermediate->application->interpretations.at("ack#") ==
                   std::vector<long long>({0, 0, 1}));
    }
    report(6, ok, "legacy replay removes the ackermann core in two steps");
}

TEST_CASE("criterion 7") {
    bool ok = true;
    auto doc = load_corpus("mccarthy");
    auto f = [](TermPtr t) { return Term::app(plain("f", 1), {std::move(t)}); };

    auto witness = normalize(doc.trs, f(s_tower(zero(), 100)));
    ACCEPT(!witness.budget_exhausted);
    ACCEPT(equal_terms(witness.term, s_tower(zero(), 91)));
    ACCEPT(witness.steps == static_cast<int>(witness.path.size()));
    ACCEPT(witness.steps > 0);

    int mismatches = 0;
    for (int n = -20; n <= 120; ++n) {
        auto reduced = normalize(doc.trs, f(Term::lit(n)));
        std::int64_t want = n <= 101 ? 91 : n - 10;
        bool good = !reduced.budget_exhausted && is_interpreted_ground(reduced.term) &&
                    eval_ground_term(reduced.term) == want;
        if (!good) {
            CAPTURE(n);
            ++mismatches;
        }
    }
    ACCEPT(mismatches == 0);
    report(7, ok, "ground evaluation of the 91 function");
}

TEST_CASE("criterion 8") {
    bool ok = true;
    ValidityOracle oracle;
    int applications_checked = 0;

    for (const auto& cell : matrix().cells) {
        if (!cell.proved()) continue;
        const auto& trs = matrix().documents.at(cell.system).trs;
        auto initial = initial_problem(trs);

        for (const auto& attempt : cell.result.attempts) {
            if (!attempt.progressed || attempt.justification.interpretations.empty()) continue;
            CAPTURE(cell.system);
            CAPTURE(cell.column);

            auto problem = keep_only(initial, attempt.problem_pairs);
            auto pi = assignment_from(attempt.justification.interpretations);
            ACCEPT(attempt.justification.c0.has_value());
            long long c0 = attempt.justification.c0.value_or(0);

            auto verified = verify_model(problem, cell.kind, pi, c0, oracle);
            CAPTURE(verified.rejection);
            ACCEPT(verified.accepted);
            std::set<int> strict(verified.classification.strict_pairs.begin(),
                                 verified.classification.strict_pairs.end());
            std::set<int> bounded(verified.classification.bounded_pairs.begin(),
                                  verified.classification.bounded_pairs.end());

            std::set<Symbol> roots;
            for (const auto& pair : problem.pairs)
                if (pair.lhs->is_app()) roots.insert(pair.lhs->symbol());

            std::vector<TermPtr> seeds;
            for (const auto& root : roots) {
                if (root.arity == 1) {
                    for (int v = -150; v <= 150; v += 6)
                        seeds.push_back(Term::app(root, {Term::lit(v)}));
                } else {
                    const std::vector<std::int64_t> grid = {-150, -101, -60, -21,
                                                            0,    21,   60,  150};
                    for (auto a : grid)
                        for (auto b : grid)
                            seeds.push_back(Term::app(root, {Term::lit(a), Term::lit(b)}));
                }
            }
            ACCEPT(seeds.size() >= 50);

            bool greater = cell.kind == PiKind::Legacy || strict_is_gt(cell.kind);
            int impure_states = 0;
            int monotonicity_violations = 0;
            int strict_violations = 0;
            int bound_violations = 0;
            int stepped_chains = 0;

            for (const auto& seed : seeds) {
                for (const auto& chain : enumerate_chains(problem, seed, 8, 8, 64)) {
                    if (!chain.pair_ids.empty()) ++stepped_chains;
                    std::vector<std::int64_t> values;
                    bool pure = true;
                    for (const auto& state : chain.states) {
                        auto image = apply_pi(pi, state);
                        if (!image.pure) {
                            pure = false;
                            break;
                        }
                        values.push_back(image.poly.eval({}, {}));
                    }
                    if (!pure) {
                        ++impure_states;
                        continue;
                    }
                    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                        bool weak = greater ? values[i] >= values[i + 1]
                                            : values[i] <= values[i + 1];
                        if (!weak) ++monotonicity_violations;
                    }
                    for (std::size_t i = 0; i < chain.pair_ids.size(); ++i) {
                        std::int64_t before = values.at(2 * i);
                        std::int64_t after = values.at(2 * i + 1);
                        if (strict.count(chain.pair_ids[i])) {
                            bool drop = greater ? before > after : before < after;
                            if (!drop) ++strict_violations;
                        }
                        if (bounded.count(chain.pair_ids[i])) {
                            bool held = greater ? before >= c0 : before <= c0;
                            if (!held) ++bound_violations;
                        }
                    }
                }
            }
            CAPTURE(stepped_chains);
            ACCEPT(stepped_chains >= 5);
            ACCEPT(impure_states == 0);
            ACCEPT(monotonicity_violations == 0);
            ACCEPT(strict_violations == 0);
            ACCEPT(bound_violations == 0);
            ++applications_checked;
        }
    }
    ACCEPT(applications_checked >= 12);
    report(8, ok, "chain measures are monotone and bounded");
}

TEST_CASE("criterion 9") {
    bool ok = true;
    int models_checked = 0;
    for (const auto& cell : matrix().cells) {
        for (std::size_t i = 0; i < cell.sat_models.size(); ++i) {
            CAPTURE(cell.system);
            CAPTURE(cell.column);
            auto violation =
                smt::find_model_violation(cell.sat_systems[i], cell.sat_models[i], -200, 200);
            if (violation) CAPTURE(*violation);
            ACCEPT(!violation.has_value());
            ++models_checked;
        }
    }
    CAPTURE(models_checked);
    ACCEPT(models_checked >= 10);
    report(9, ok, "synthesized models satisfy their side conditions on a grid");
}

TEST_CASE("criterion 10") {
    bool ok = true;
    const std::vector<std::pair<std::string, std::string>> mirrors = {
        {"pi:gt-ge-ge", "pi:lt-ge-le"}, {"pi:gt-le-le", "pi:lt-le-ge"}};
    for (const auto& name : kSystems) {
        for (const auto& [left, right] : mirrors) {
            CAPTURE(name);
            CAPTURE(left);
            const auto& a = matrix().at(name, left);
            const auto& b = matrix().at(name, right);
            ACCEPT(a.proved() == b.proved());

            auto first_pi_progress = [](const Cell& cell) -> std::optional<bool> {
                for (const auto& attempt : cell.result.attempts)
                    if (attempt.justification.processor != "scc") return attempt.progressed;
                return std::nullopt;
            };
            ACCEPT(first_pi_progress(a) == first_pi_progress(b));
        }
    }
    report(10, ok, "mirrored kinds agree on progress and verdicts");
}
