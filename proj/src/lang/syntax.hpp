#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "livemodel/ast.hpp"
#include "livemodel/diagnostic.hpp"
#include "livemodel/schema.hpp"

namespace livemodel::detail {

// Syntax only: names are left as ExprKind::Ident.
Model parse_syntax(std::string_view text, std::vector<Diagnostic>& diags);
std::optional<Expr> parse_expr_syntax(std::string_view text, std::vector<Diagnostic>& diags);
std::optional<Formula> parse_formula_syntax(std::string_view text, std::vector<Diagnostic>& diags);

// Name resolution. Appends diagnostics; the model is resolved in place.
void resolve_model(Model& model, std::vector<Diagnostic>& diags);
void resolve_expr(Expr& expr, const Schema& schema, const std::vector<std::string>& vars,
                  std::vector<Diagnostic>& diags);
void resolve_formula(Formula& formula, const Schema& schema, std::vector<std::string>& vars,
                     std::vector<Diagnostic>& diags);

// Typing. slot_types holds the type of each bound variable by slot.
void type_formula(Formula& formula, const Schema& schema, std::vector<RelType>& slot_types,
                  std::vector<Diagnostic>& diags);

}  // namespace livemodel::detail
