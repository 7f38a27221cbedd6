#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livemodel/ast.hpp"
#include "livemodel/diagnostic.hpp"
#include "livemodel/schema.hpp"

namespace livemodel {

struct ParseResult {
    std::optional<Model> model;  // present only when there are no errors
    std::vector<Diagnostic> diagnostics;
};

/// Parses model source and resolves every name. Syntax errors are recovered at
/// statement boundaries so that one diagnostic is produced per broken statement.
ParseResult parse(std::string_view text);

/// A model whose every expression carries its relational type.
struct TypedModel {
    Model model;
    std::shared_ptr<const Schema> schema;
    std::vector<Diagnostic> warnings;

    const Block* find_pred(std::string_view name) const;
    /// Conjunction of every fact block.
    Formula facts() const;
    /// Goal of the i-th run command (predicate body or inline body).
    Formula command_goal(size_t index) const;
    ScopeSpec command_scope(size_t index) const;
};

struct TypecheckResult {
    std::shared_ptr<const TypedModel> model;  // null when diagnostics contain errors
    std::vector<Diagnostic> diagnostics;      // errors and warnings
};

TypecheckResult typecheck(Model model);

/// parse followed by typecheck.
TypecheckResult compile(std::string_view text);

/// A quantifier variable visible at some point of a formula.
struct ScopedVar {
    std::string name;
    RelType type;
};

struct ExprResult {
    std::optional<Expr> expr;
    std::vector<Diagnostic> diagnostics;
};

struct FormulaResult {
    std::optional<Formula> formula;
    std::vector<Diagnostic> diagnostics;
};

/// Parses, resolves, and types a standalone expression against a compiled model.
/// Variables take slots 0..vars.size()-1 in order.
ExprResult parse_expr(std::string_view text, const TypedModel& model, const std::vector<ScopedVar>& vars = {});

/// Parses, resolves, and types a standalone formula against a compiled model. Free
/// variables take slots 0..vars.size()-1; quantifiers inside bind later slots.
FormulaResult parse_formula(std::string_view text, const TypedModel& model, const std::vector<ScopedVar>& vars = {});

/// Types an already resolved expression. Returns diagnostics (errors abort typing).
std::vector<Diagnostic> type_expr(Expr& expr, const Schema& schema, const std::vector<RelType>& slot_types);

std::string pretty_print(const Model& model);
std::string to_text(const Expr& expr);
std::string to_text(const Formula& formula);
std::string render_type(const RelType& type, const Schema& schema);

}  // namespace livemodel
