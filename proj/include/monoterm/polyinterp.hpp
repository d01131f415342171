#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoterm/dp.hpp"
#include "monoterm/linpoly.hpp"
#include "monoterm/smt.hpp"
#include "monoterm/validity.hpp"

namespace monoterm {

/// The five interpretation-based processors.  The legacy one interprets
/// marked symbols only, keeps their reducible-position coefficients at
/// zero, and needs a filter set on top of the strict and bounded sets.
/// The four directional ones interpret every uninterpreted symbol and are
/// told apart by an orientation triple: the strict direction of pair
/// comparisons, the direction of rule comparisons, and the sign imposed on
/// reducible-position coefficients.
enum class PiKind { Legacy, GtGeGe, LtGeLe, GtLeLe, LtLeGe };

/// "legacy-pi" or "pi(>,>=,>=)" style display names.
std::string to_string(PiKind kind);

/// "(>,>=,>=)" for the directional kinds, empty for the legacy one.
std::string variant_suffix(PiKind kind);

/// Pair comparisons use > when true, < otherwise.
bool strict_is_gt(PiKind kind);
/// Rule comparisons use >= when true, <= otherwise.
bool rules_are_ge(PiKind kind);
/// Reducible-position coefficients are >= 0 when true, <= 0 otherwise.
bool reducibles_are_ge(PiKind kind);

/// Affine interpretation a0 + a1*x1 + ... + an*xn of one n-ary symbol.
/// Coefficients are plain integers in a concrete assignment and carry
/// solver unknowns in a template.
struct AffineInterp {
    std::vector<CoefExpr> coeffs;

    int arity() const { return static_cast<int>(coeffs.size()) - 1; }
    bool concrete() const;
    std::vector<long long> constant_coeffs() const;
};

AffineInterp concrete_interp(const std::vector<std::int64_t>& coeffs);

struct PIAssignment {
    std::map<Symbol, AffineInterp> interps;

    bool defines(const Symbol& symbol) const { return interps.count(symbol) != 0; }
    const AffineInterp& at(const Symbol& symbol) const;
};

/// Image of a term under an assignment.  Interpreted symbols always take
/// their integer semantics; an assigned symbol substitutes the images of
/// its arguments into its affine form, where arguments under a
/// structurally zero coefficient are dropped entirely; an unassigned
/// uninterpreted symbol makes the image impure and is recorded, and then
/// poly only covers the pure part.
struct PiImage {
    LinearPoly poly;
    bool pure = true;
    std::set<std::string> residuals;
};

PiImage apply_pi(const PIAssignment& pi, const TermPtr& t);

/// Argument positions of marked symbols that some pair's right-hand side
/// fills with a term outside T(G, Var(constraint)).  Rewriting below a
/// marked root can only happen there.  Symbols without such positions have
/// no entry.
std::map<Symbol, std::set<int>> reducible_positions(const std::vector<DependencyPair>& pairs);

struct SubtractionViolation {
    std::string where;
    Position position;
};

/// Right-hand sides of rules and pairs must keep second arguments of
/// binary subtraction inside T(G, Var(constraint)); anything else could be
/// rewritten there and flip the direction of a comparison.
std::vector<SubtractionViolation> check_subtraction_arguments(
    const ConstrainedTRS& trs, const std::vector<DependencyPair>& pairs);

struct PairGuards {
    int pair_id = 0;
    std::string strict_name;
    std::string bound_name;
    std::string filter_name;
};

/// One synthesis problem: templates over the interpreted domain, their
/// unknowns in declaration order, per-pair selector booleans, and the
/// assembled assertions.  Legacy coefficients pinned to zero up front are
/// listed in forced_zero.  When no model can exist for structural reasons
/// the system is left empty and the reason says why.
struct BuildResult {
    smt::ConstraintSystem system;
    PIAssignment templates;
    std::vector<std::string> unknown_order;
    std::vector<PairGuards> guards;
    std::set<std::string> forced_zero;
    bool structurally_infeasible = false;
    std::string reason;
};

/// coefficient_bound restricts every template unknown to [-b, b]; the
/// default search is unbounded.
BuildResult build_conditions(const DPProblem& problem, PiKind kind,
                             std::optional<std::int64_t> coefficient_bound = std::nullopt);

/// How the pairs fall under a concrete interpretation: strictly oriented,
/// bounded against c0, and (legacy only) filterable.  c0 is kept exactly
/// when some pair is bounded.
struct Classification {
    std::vector<int> strict_pairs;
    std::vector<int> bounded_pairs;
    std::vector<int> filter_pairs;
    std::optional<long long> c0;
};

struct VerifyResult {
    bool accepted = false;
    std::string rejection;
    Classification classification;
};

/// Independent check of a concrete interpretation: global side conditions
/// first, then a maximal per-pair classification by validity alone, so the
/// outcome never depends on which selector booleans a solver happened to
/// set.  Any undetermined validity check rejects the whole model.  The
/// interpretation must be concrete and cover the kind's full domain.
VerifyResult verify_model(const DPProblem& problem, PiKind kind, const PIAssignment& pi,
                          std::int64_t c0, ValidityOracle& oracle);

struct PinnedModel {
    std::map<std::string, std::vector<long long>> interpretations;
    long long c0 = 0;
};

/// {"models": [{"interpretations": {"f#": [a0, a1, ...]}, "c0": n}, ...]}
std::deque<PinnedModel> parse_pinned_models(const nlohmann::json& doc);
std::deque<PinnedModel> load_pinned_models(const std::string& path);

/// Shared context for interpretation processors: the synthesis solver, the
/// oracle that verifies models, externally pinned models consumed
/// front-first instead of solving, and an optional observer of every raw
/// solver round trip.
struct PiServices {
    smt::SolverConfig solver;
    ValidityOracle oracle;
    std::deque<PinnedModel> pinned;
    std::function<void(const smt::ConstraintSystem&, const smt::SolverVerdict&)> on_check;
    /// Synthesis searches |coefficient| <= bound so that every model it can
    /// return is one verify_model can check; disable with nullopt.
    std::optional<std::int64_t> coefficient_bound = 64;
    int checks_issued = 0;

    PiServices();
    explicit PiServices(smt::SolverConfig config);
};

/// Builds the side conditions for the problem, obtains a model (pinned or
/// solved), verifies it, and removes the strictly oriented and bounded
/// (and legacy-filtered) pairs in separate subproblems.  Without a usable
/// model the input problem is returned unchanged and the justification
/// says whether no model exists or the question stayed open.
ProcessorOutcome pi_processor(const DPProblem& problem, PiKind kind, PiServices& services);

StrategyEntry make_pi_entry(PiKind kind, std::shared_ptr<PiServices> services);

/// Comma-separated processor names: "scc", "legacy" (or "legacy-pi"), and
/// "pi:gt-ge-ge" style direction triples.
Strategy build_strategy(const std::string& tokens, std::shared_ptr<PiServices> services);

std::string default_strategy_tokens();
Strategy default_strategy(std::shared_ptr<PiServices> services);

}  // namespace monoterm
