#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "livemodel/cancel.hpp"
#include "livemodel/eval.hpp"

namespace livemodel {

/// Upper bounds per top-level sig; `one` sigs are exactly 1 regardless of bounds.
struct Scope {
    int default_bound = 3;
    std::vector<std::pair<std::string, int>> per_sig;

    static Scope from(const ScopeSpec& spec) { return {spec.default_bound, spec.per_sig}; }
    /// Inclusive [lo, hi] atom counts per top-level sig ordinal. Throws InvalidArgument on
    /// negative bounds or unknown names.
    std::vector<std::pair<int, int>> ranges(const Schema& schema) const;
};

/// Ordering key of an instance: top-level counts, then the membership and tuple bits.
struct CanonicalKey {
    std::vector<int> counts;
    std::vector<bool> bits;

    auto operator<=>(const CanonicalKey&) const = default;
    bool operator==(const CanonicalKey&) const = default;
};

CanonicalKey canonical_key(const Instance& inst);

class SearchEngine;

/// Lazily yields the instances satisfying facts, implicit constraints and a goal,
/// in ascending canonical-key order.
class SolutionCursor {
public:
    SolutionCursor(std::shared_ptr<const TypedModel> model, Formula goal, Scope scope, SearchControl control = {});
    ~SolutionCursor();
    SolutionCursor(SolutionCursor&&) noexcept;
    SolutionCursor& operator=(SolutionCursor&&) noexcept;

    /// Next solution, or nullopt once exhausted. Throws Error(Cancelled).
    std::optional<Instance> next();
    bool exhausted() const;
    /// Number of solutions yielded so far.
    uint64_t position() const { return position_; }
    /// Candidates examined so far (complete assignments whose formula was evaluated).
    uint64_t candidates() const;

    /// Repositions so that next() yields the first solution whose key exceeds inst's.
    void seek_past(const Instance& inst);

    const Formula& goal() const { return goal_; }
    const TypedModel& model() const { return *model_; }
    const Scope& scope() const { return scope_; }
    void set_control(SearchControl control);

private:
    std::shared_ptr<const TypedModel> model_;
    Formula goal_;
    Scope scope_;
    std::unique_ptr<SearchEngine> engine_;
    uint64_t position_ = 0;
};

/// Throws ScopeTooLarge when the candidate space exceeds the control's budget.
SolutionCursor enumerate(std::shared_ptr<const TypedModel> model, const Formula& goal, const Scope& scope,
                         SearchControl control = {});

enum class Category { StayedValid, BecameValid, StayedInvalid, BecameInvalid };
inline constexpr std::array<Category, 4> kCategories = {Category::StayedValid, Category::BecameValid,
                                                        Category::StayedInvalid, Category::BecameInvalid};

const char* to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// Goal part of a category query (facts are added by the cursor).
Formula category_query(Category c, const Formula& old_goal, const Formula& new_goal);

struct CategoryStreams {
    std::shared_ptr<const TypedModel> model;
    Scope scope;
    Formula old_goal;
    Formula new_goal;
    std::array<std::unique_ptr<SolutionCursor>, 4> cursors;

    SolutionCursor& at(Category c) { return *cursors[static_cast<int>(c)]; }
    const SolutionCursor& at(Category c) const { return *cursors[static_cast<int>(c)]; }
};

CategoryStreams categorize(std::shared_ptr<const TypedModel> model, const Formula& old_goal, const Formula& new_goal,
                           const Scope& scope, SearchControl control = {});

/// Whether inst lies in the given category's stream, decided by checking alone.
bool is_representative(const Instance& inst, const CategoryStreams& streams, Category c);

/// Whether inst's atom counts are within scope.
bool within_scope(const Instance& inst, const Scope& scope);

}  // namespace livemodel
