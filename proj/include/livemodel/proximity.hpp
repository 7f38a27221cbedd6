#pragma once

#include <optional>
#include <string>
#include <vector>

#include "livemodel/finder.hpp"

namespace livemodel {

/// Number of sig memberships (top-level ones included) and field tuples present in
/// exactly one of the two instances. Atoms are compared by top-level sig and index,
/// so instances over different atom counts compare as subsets of one atom pool.
int instance_distance(const Instance& a, const Instance& b);

enum class Polarity { Valid, Invalid };

const char* to_string(Polarity p);
std::optional<Polarity> polarity_from_string(std::string_view s);

struct ClosestResult {
    Instance instance;
    int distance = 0;
    uint64_t candidates = 0;
};

/// Instance within scope that satisfies facts and the goal (Valid) or facts
/// and the negated goal (Invalid) at minimal distance from target; the earliest in
/// canonical order among equals. nullopt when no such instance exists.
/// Throws InvalidArgument when target lies outside scope, ScopeTooLarge, Cancelled.
std::optional<ClosestResult> closest(const TypedModel& model, const Formula& goal, const Instance& target,
                                     Polarity polarity, const Scope& scope, const SearchControl& control = {});

struct BindingRow {
    Bindings bindings;
    /// nullopt when the binding is outside that instance's quantifier domain.
    std::optional<bool> value_a;
    std::optional<bool> value_b;
};

struct BreakdownRow {
    /// Fact name or goal id; quantified subformulas append "/k" (pre-order index).
    std::string id;
    Span span;
    std::string formula;
    /// Enclosing quantifier bindings (quantified subformulas only).
    Bindings context;
    std::optional<bool> value_a;
    std::optional<bool> value_b;
    std::vector<BindingRow> per_binding;
};

struct BreakdownReport {
    std::vector<BreakdownRow> rows;
};

/// Rows for every fact block, the goal and every quantified subformula (per enclosing
/// binding) whose truth differs between a and b. A formula whose root is a quantifier
/// carries its per-binding values on its own row.
BreakdownReport breakdown(const TypedModel& model, const Formula& goal, const Instance& a, const Instance& b,
                          const std::string& goal_id = "$goal");

}  // namespace livemodel
