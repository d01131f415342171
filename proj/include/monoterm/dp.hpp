#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoterm/ctrs.hpp"
#include "monoterm/validity.hpp"

namespace monoterm {

/// A DP problem (S, R).  Processors shrink S; R is shared and never
/// modified.
struct DPProblem {
    std::vector<DependencyPair> pairs;
    std::shared_ptr<const ConstrainedTRS> system;

    bool trivial() const { return pairs.empty(); }
    std::vector<int> pair_ids() const;
};

/// (DP(R), R), the problem whose finiteness implies termination of R.
DPProblem initial_problem(const ConstrainedTRS& trs);

/// What a processor application did, in the shape the proof record
/// serializes: processor name, variant tuple when there is one, removed
/// pair ids, and the found interpretation (coefficients a0..an per symbol)
/// with its bound c0.
struct Justification {
    std::string processor;
    std::string variant;
    std::string note;
    std::vector<int> removed_pairs;
    std::map<std::string, std::vector<long long>> interpretations;
    std::optional<long long> c0;
    std::string solver_status;
    std::optional<double> solver_seconds;
};

struct ProcessorOutcome {
    std::vector<DPProblem> subproblems;
    Justification justification;
};

using ProcessorFn = std::function<ProcessorOutcome(const DPProblem&)>;

struct StrategyEntry {
    std::string name;
    ProcessorFn run;
};

using Strategy = std::vector<StrategyEntry>;

/// Over-approximated chain adjacency: an edge u -> v whenever the root of
/// u's right-hand side equals the root of v's left-hand side.  With an
/// oracle, pairs whose constraint is unsatisfiable drop out entirely.
struct DependencyGraph {
    std::vector<int> nodes;
    std::map<int, std::set<int>> successors;
};

DependencyGraph dependency_graph(const DPProblem& problem, ValidityOracle* oracle = nullptr);

/// Components with ids ascending, ordered by smallest member.
std::vector<std::vector<int>> strongly_connected_components(const DependencyGraph& graph);

/// One subproblem per cyclic component (a component with at least one edge,
/// self-loops included); everything else is dropped.
ProcessorOutcome scc_processor(const DPProblem& problem);

StrategyEntry make_scc_entry();

/// True when the outcome lets the framework shrink the problem: either no
/// subproblems remain, or every subproblem keeps strictly fewer pairs than
/// the input.  Anything weaker would hand the driver its input back and
/// loop.
bool makes_progress(const DPProblem& input, const ProcessorOutcome& outcome);

enum class Verdict { Proved, Unknown };

std::string to_string(Verdict verdict);

struct ProofNode {
    DPProblem problem;
    std::optional<Justification> application;
    std::vector<std::unique_ptr<ProofNode>> children;
};

struct AttemptRecord {
    std::vector<int> problem_pairs;
    bool progressed = false;
    Justification justification;
};

struct FrameworkResult {
    std::unique_ptr<ProofNode> root;
    Verdict verdict = Verdict::Unknown;
    int applications = 0;
    bool budget_exhausted = false;
    std::vector<AttemptRecord> attempts;

    bool proved() const { return verdict == Verdict::Proved; }
};

/// Worklist driver: on each open problem, the first strategy entry that
/// makes progress is applied and recorded; a problem no entry advances
/// stays an unresolved leaf.  Proved iff every leaf is trivial within the
/// application budget.
FrameworkResult run_framework(DPProblem problem, const Strategy& strategy,
                              int max_applications = 64);
FrameworkResult run_framework(const ConstrainedTRS& trs, const Strategy& strategy,
                              int max_applications = 64);

std::string to_text(const FrameworkResult& result);

/// Stable structured form of the proof: verdict plus one record per
/// processor application (no timings, so golden output only changes when
/// the proof does).
nlohmann::json to_json(const FrameworkResult& result);

/// A bounded dependency chain: states s0#, t0#, s1#, t1#, ... where each
/// s_i# -> t_i# is a root step with pairs[i] and t_i# reaches s_{i+1}# by
/// below-root rewriting.
struct Chain {
    std::vector<TermPtr> states;
    std::vector<int> pair_ids;
    bool truncated = false;
};

/// All ground chains of at most `depth` root steps starting at seed, an
/// exhaustive oracle for desk-scale instances.  Per gap at most r_step_cap
/// distinct below-root reducts are explored and at most chain_cap chains
/// are produced; chains cut short by either cap are marked truncated.
std::vector<Chain> enumerate_chains(const DPProblem& problem, const TermPtr& seed, int depth,
                                    int r_step_cap = 64, int chain_cap = 4096);

}  // namespace monoterm
