#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "livemodel/instance.hpp"
#include "livemodel/lang.hpp"

namespace livemodel {

inline constexpr Atom kNoAtom = 0xffffffffu;

/// Variable environment indexed by resolution slot; unbound slots hold kNoAtom.
using Env = std::vector<Atom>;

TupleSet eval_expr(const Instance& inst, const Expr& expr, const Env& env = {});

/// Black-box evaluation; may short-circuit.
bool eval_formula(const Instance& inst, const Formula& formula, const Env& env = {});

using Bindings = std::vector<std::pair<std::string, Atom>>;

struct TraceNode {
    enum class Kind { Formula, Expr };
    Kind kind = Kind::Formula;
    Span span;
    const Formula* formula = nullptr;
    const Expr* expr = nullptr;
    bool truth = false;  // formulas
    TupleSet value;      // expressions
    Bindings bindings;   // every variable bound at this node, outermost first
    /// Formulas: operand nodes. Quantifiers: one body node per enumerated binding.
    std::vector<TraceNode> children;
    /// Quantifiers: each evaluation of a declaration domain.
    std::vector<TraceNode> domains;
};

/// White-box evaluation of a closed formula. Nothing is short-circuited.
/// The trace points into `formula`, which must outlive it.
TraceNode eval_trace(const Instance& inst, const Formula& formula);

struct CheckResult {
    bool overall = false;
    /// Fact blocks by name, "$implicit" for structural constraints, then the goal.
    std::vector<std::pair<std::string, bool>> per_formula;

    std::optional<bool> find(const std::string& id) const;
};

inline constexpr const char* kImplicitId = "$implicit";

/// Checks facts, implicit constraints, and optionally a named predicate. An instance
/// built against another schema of the same shape is rebound by name first.
CheckResult check_instance(const TypedModel& model, const Instance& inst,
                           const std::optional<std::string>& pred = std::nullopt);
CheckResult check_instance(const TypedModel& model, const Instance& inst, const Formula& goal,
                           const std::string& goal_id = "$goal");

/// check_instance(...).overall without the per-formula bookkeeping.
bool satisfies(const TypedModel& model, const Instance& inst, const Formula& goal);

/// Every universe atom as a variable typed by its top-level sig, with the matching
/// environment, so atom names can be used in expressions evaluated over `inst`.
struct AtomScope {
    std::vector<ScopedVar> vars;
    Env env;
};
AtomScope atom_scope(const Instance& inst);

/// Returns inst itself when it already uses the model's schema, otherwise a rebound copy.
Instance align(const TypedModel& model, const Instance& inst);

}  // namespace livemodel
