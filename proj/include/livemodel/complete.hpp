#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livemodel/eval.hpp"

namespace livemodel {

enum class CursorKind {
    AfterDot,    // `prefix.|`
    AfterUnary,  // `prefix.^|`, `prefix.*|`, `prefix.~|`
};

struct CompletionContext {
    Expr prefix;
    CursorKind kind = CursorKind::AfterDot;
    ExprKind unary = ExprKind::Closure;  // AfterUnary only
    /// Identifier characters already typed after the operator; candidates must start with it.
    std::string partial;
    /// Quantifier variables in scope at the cursor; they occupy slots 0..n-1.
    std::vector<ScopedVar> vars;
    /// Byte range the selected suggestion replaces (the partial identifier).
    Span replace;
};

struct Suggestion {
    std::string text;
    Expr full;
    RelType type;
    std::optional<TupleSet> value;
    int rank = 0;
};

struct SuggestionList {
    std::vector<Suggestion> items;
    bool overflow = false;
};

inline constexpr size_t kMaxSuggestions = 20;

/// Builds the completion context at a byte offset of (possibly incomplete) model text,
/// typed against `model`. Throws NoPrefixContext when the cursor does not follow a
/// dot-expression (or sits in a comment) and VacuousPrefix when the prefix is always empty.
CompletionContext completion_context(std::string_view text, size_t offset, const TypedModel& model);

/// After-dot context for a standalone prefix expression. Throws InvalidArgument when the
/// prefix does not type-check and VacuousPrefix when it is always empty.
CompletionContext prefix_context(std::string_view prefix, const TypedModel& model,
                                 const std::vector<ScopedVar>& vars = {});

/// Type-directed continuations of the prefix, ranked: fields alphabetically with their
/// closure variants right after them (self-composable fields only), then sig names. Values are attached when an
/// instance is given and every variable of the expression is bound in env.
SuggestionList suggest(const TypedModel& model, const CompletionContext& ctx, const Instance* inst = nullptr,
                       const Env& env = {});

/// Same list with values recomputed over inst. Throws StructuralMismatch.
SuggestionList reannotate(const TypedModel& model, SuggestionList list, const Instance& inst, const Env& env = {});

}  // namespace livemodel
