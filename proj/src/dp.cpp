#include "monoterm/dp.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace monoterm {

std::vector<int> DPProblem::pair_ids() const {
    std::vector<int> ids;
    ids.reserve(pairs.size());
    for (const auto& pair : pairs) ids.push_back(pair.id);
    return ids;
}

DPProblem initial_problem(const ConstrainedTRS& trs) {
    DPProblem problem;
    problem.system = std::make_shared<ConstrainedTRS>(trs);
    problem.pairs = compute_dependency_pairs(*problem.system);
    return problem;
}

DependencyGraph dependency_graph(const DPProblem& problem, ValidityOracle* oracle) {
    DependencyGraph graph;
    std::set<int> pruned;
    for (const auto& pair : problem.pairs) {
        graph.nodes.push_back(pair.id);
        graph.successors[pair.id];
        if (oracle && oracle->is_satisfiable(pair.constraint) == Truth::No)
            pruned.insert(pair.id);
    }
    for (const auto& from : problem.pairs) {
        if (pruned.count(from.id)) continue;
        for (const auto& to : problem.pairs) {
            if (pruned.count(to.id)) continue;
            if (from.rhs->symbol() == to.lhs->symbol())
                graph.successors[from.id].insert(to.id);
        }
    }
    return graph;
}

namespace {

struct TarjanState {
    const DependencyGraph* graph;
    std::map<int, int> index;
    std::map<int, int> lowlink;
    std::set<int> on_stack;
    std::vector<int> stack;
    int counter = 0;
    std::vector<std::vector<int>> components;

    void visit(int v) {
        index[v] = lowlink[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (int w : graph->successors.at(v)) {
            if (!index.count(w)) {
                visit(w);
                lowlink[v] = std::min(lowlink[v], lowlink[w]);
            } else if (on_stack.count(w)) {
                lowlink[v] = std::min(lowlink[v], index[w]);
            }
        }
        if (lowlink[v] == index[v]) {
            std::vector<int> component;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                component.push_back(w);
            } while (w != v);
            std::sort(component.begin(), component.end());
            components.push_back(std::move(component));
        }
    }
};

std::string join_ids(const std::vector<int>& ids) {
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(ids[i]);
    }
    return out + "}";
}

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(const DependencyGraph& graph) {
    TarjanState state;
    state.graph = &graph;
    for (int v : graph.nodes)
        if (!state.index.count(v)) state.visit(v);
    std::sort(state.components.begin(), state.components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return state.components;
}

ProcessorOutcome scc_processor(const DPProblem& problem) {
    ProcessorOutcome outcome;
    outcome.justification.processor = "scc";
    auto graph = dependency_graph(problem);
    auto components = strongly_connected_components(graph);
    std::set<int> kept;
    std::vector<std::string> notes;
    for (const auto& component : components) {
        bool cyclic = false;
        for (int v : component)
            for (int w : graph.successors.at(v))
                if (std::binary_search(component.begin(), component.end(), w)) cyclic = true;
        if (!cyclic) continue;
        DPProblem sub;
        sub.system = problem.system;
        for (const auto& pair : problem.pairs)
            if (std::binary_search(component.begin(), component.end(), pair.id))
                sub.pairs.push_back(pair);
        kept.insert(component.begin(), component.end());
        notes.push_back(join_ids(component));
        outcome.subproblems.push_back(std::move(sub));
    }
    for (const auto& pair : problem.pairs)
        if (!kept.count(pair.id)) outcome.justification.removed_pairs.push_back(pair.id);
    outcome.justification.note = notes.empty() ? "no cyclic components" : "cyclic components";
    for (const auto& n : notes) outcome.justification.note += " " + n;
    return outcome;
}

StrategyEntry make_scc_entry() { return {"scc", scc_processor}; }

bool makes_progress(const DPProblem& input, const ProcessorOutcome& outcome) {
    if (outcome.subproblems.empty()) return true;
    for (const auto& sub : outcome.subproblems)
        if (sub.pairs.size() >= input.pairs.size()) return false;
    return true;
}

std::string to_string(Verdict verdict) {
    return verdict == Verdict::Proved ? "proved" : "unknown";
}

namespace {

bool all_leaves_trivial(const ProofNode& node) {
    if (node.children.empty()) return node.problem.trivial();
    for (const auto& child : node.children)
        if (!all_leaves_trivial(*child)) return false;
    return true;
}

std::string render_affine(const std::vector<long long>& coeffs) {
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        long long c = coeffs[i];
        if (c == 0) continue;
        std::string magnitude;
        if (i == 0) {
            magnitude = std::to_string(c < 0 ? -c : c);
        } else {
            std::string var = "x" + std::to_string(i);
            magnitude = (c == 1 || c == -1) ? var : std::to_string(c < 0 ? -c : c) + "*" + var;
        }
        if (out.empty())
            out = (c < 0 ? "-" : "") + magnitude;
        else
            out += (c < 0 ? " - " : " + ") + magnitude;
    }
    return out.empty() ? "0" : out;
}

void render_node(const ProofNode& node, int depth, std::string& out) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    out += pad;
    if (node.problem.trivial())
        out += "pairs {} (trivial)\n";
    else
        out += "pairs " + join_ids(node.problem.pair_ids()) + "\n";
    if (node.application) {
        const auto& just = *node.application;
        out += pad + "* " + just.processor + just.variant;
        if (!just.removed_pairs.empty()) out += " removed " + join_ids(just.removed_pairs);
        for (const auto& [name, coeffs] : just.interpretations)
            out += "; Pol(" + name + ") = " + render_affine(coeffs);
        if (just.c0) out += "; c0 = " + std::to_string(*just.c0);
        if (!just.note.empty()) out += "  [" + just.note + "]";
        out += "\n";
        for (const auto& child : node.children) render_node(*child, depth + 1, out);
    }
}

nlohmann::json justification_json(const Justification& just) {
    nlohmann::json j;
    j["processor"] = just.processor;
    if (!just.variant.empty()) j["variant"] = just.variant;
    j["removed"] = just.removed_pairs;
    if (!just.interpretations.empty()) {
        nlohmann::json interps;
        for (const auto& [name, coeffs] : just.interpretations) interps[name] = coeffs;
        j["interpretations"] = interps;
    }
    if (just.c0) j["c0"] = *just.c0;
    return j;
}

nlohmann::json node_json(const ProofNode& node) {
    nlohmann::json j;
    j["pairs"] = node.problem.pair_ids();
    if (node.application) j["application"] = justification_json(*node.application);
    auto children = nlohmann::json::array();
    for (const auto& child : node.children) children.push_back(node_json(*child));
    j["children"] = children;
    return j;
}

}  // namespace

FrameworkResult run_framework(DPProblem problem, const Strategy& strategy,
                              int max_applications) {
    if (strategy.empty()) throw std::runtime_error("run_framework: empty strategy");
    FrameworkResult result;
    result.root = std::make_unique<ProofNode>();
    result.root->problem = std::move(problem);
    std::deque<ProofNode*> open;
    if (!result.root->problem.trivial()) open.push_back(result.root.get());
    while (!open.empty()) {
        if (result.applications >= max_applications) {
            result.budget_exhausted = true;
            break;
        }
        ProofNode* node = open.front();
        open.pop_front();
        for (const auto& entry : strategy) {
            auto outcome = entry.run(node->problem);
            bool progressed = makes_progress(node->problem, outcome);
            result.attempts.push_back(
                {node->problem.pair_ids(), progressed, outcome.justification});
            if (!progressed) continue;
            ++result.applications;
            node->application = std::move(outcome.justification);
            for (auto& sub : outcome.subproblems) {
                auto child = std::make_unique<ProofNode>();
                child->problem = std::move(sub);
                if (!child->problem.trivial()) open.push_back(child.get());
                node->children.push_back(std::move(child));
            }
            break;
        }
    }
    result.verdict =
        !result.budget_exhausted && all_leaves_trivial(*result.root) ? Verdict::Proved
                                                                     : Verdict::Unknown;
    return result;
}

FrameworkResult run_framework(const ConstrainedTRS& trs, const Strategy& strategy,
                              int max_applications) {
    return run_framework(initial_problem(trs), strategy, max_applications);
}

std::string to_text(const FrameworkResult& result) {
    std::string out = "verdict: " + to_string(result.verdict) + "\n";
    render_node(*result.root, 0, out);
    return out;
}

nlohmann::json to_json(const FrameworkResult& result) {
    nlohmann::json j;
    j["verdict"] = to_string(result.verdict);
    j["applications"] = result.applications;
    j["budget_exhausted"] = result.budget_exhausted;
    j["tree"] = node_json(*result.root);
    auto attempts = nlohmann::json::array();
    for (const auto& attempt : result.attempts) {
        nlohmann::json a;
        a["pairs"] = attempt.problem_pairs;
        a["progressed"] = attempt.progressed;
        a["justification"] = justification_json(attempt.justification);
        attempts.push_back(a);
    }
    j["attempts"] = attempts;
    return j;
}

namespace {

std::optional<TermPtr> pair_root_step(const DependencyPair& pair, const TermPtr& t) {
    auto sigma = match_term(pair.lhs, t);
    if (!sigma) return std::nullopt;
    if (!substitution_interpreted_on(*sigma, vars_of(pair.constraint))) return std::nullopt;
    auto instance = substitute(pair.constraint, *sigma);
    if (!vars_of(instance).empty()) return std::nullopt;
    if (!eval_ground_formula(instance)) return std::nullopt;
    return apply_substitution(pair.rhs, *sigma);
}

std::vector<TermPtr> reachable_below_root(const ConstrainedTRS& trs, const TermPtr& from,
                                          int cap, bool& truncated) {
    std::vector<TermPtr> order{from};
    std::set<std::string> seen{to_string(from)};
    std::size_t next = 0;
    while (next < order.size()) {
        TermPtr u = order[next++];
        for (const auto& step : rewrite_steps(trs, u)) {
            if (step.position.empty()) continue;
            auto key = to_string(step.result);
            if (seen.count(key)) continue;
            if (static_cast<int>(order.size()) >= cap) {
                truncated = true;
                return order;
            }
            seen.insert(key);
            order.push_back(step.result);
        }
    }
    return order;
}

}  // namespace

std::vector<Chain> enumerate_chains(const DPProblem& problem, const TermPtr& seed, int depth,
                                    int r_step_cap, int chain_cap) {
    if (!seed->is_app() || !seed->symbol().is_marked())
        throw std::runtime_error("enumerate_chains: seed must be rooted in a marked symbol");
    if (!is_ground(seed)) throw std::runtime_error("enumerate_chains: seed must be ground");
    std::vector<Chain> out;
    bool capped = false;
    std::vector<TermPtr> states{seed};
    std::vector<int> ids;

    std::function<void(bool, int)> go = [&](bool truncated, int depth_left) {
        if (static_cast<int>(out.size()) >= chain_cap) {
            capped = true;
            if (!out.empty()) out.back().truncated = true;
            return;
        }
        out.push_back({states, ids, truncated});
        if (depth_left == 0) return;
        TermPtr from = states.back();
        bool gap_truncated = false;
        std::vector<TermPtr> sources;
        if (states.size() == 1)
            sources = {from};
        else
            sources = reachable_below_root(*problem.system, from, r_step_cap, gap_truncated);
        for (const auto& source : sources) {
            for (const auto& pair : problem.pairs) {
                auto target = pair_root_step(pair, source);
                if (!target) continue;
                bool record_source = states.size() > 1;
                if (record_source) states.push_back(source);
                states.push_back(*target);
                ids.push_back(pair.id);
                go(truncated || gap_truncated, depth_left - 1);
                ids.pop_back();
                states.pop_back();
                if (record_source) states.pop_back();
                if (capped) return;
            }
        }
    };
    go(false, depth);
    return out;
}

}  // namespace monoterm
