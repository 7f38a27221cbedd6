#include <set>
#include <string>

#include "syntax.hpp"

namespace livemodel::detail {

namespace {

void error(std::vector<Diagnostic>& diags, Span span, std::string message, const char* code) {
    diags.push_back({Severity::Error, span, std::move(message), code, {}});
}

bool reserved(const std::string& name) {
    return name == "univ" || name == "iden" || name == "none" || name == "Int" || name == "seq";
}

}  // namespace

void resolve_expr(Expr& expr, const Schema& schema, const std::vector<std::string>& vars,
                  std::vector<Diagnostic>& diags) {
    if (expr.kind == ExprKind::Ident) {
        for (size_t i = vars.size(); i-- > 0;) {
            if (vars[i] == expr.name) {
                expr.kind = ExprKind::VarRef;
                expr.ref = static_cast<int>(i);
                return;
            }
        }
        if (int s = schema.find_sig(expr.name); s >= 0) {
            expr.kind = ExprKind::SigRef;
            expr.ref = s;
            return;
        }
        if (int f = schema.find_field(expr.name); f >= 0) {
            expr.kind = ExprKind::FieldRef;
            expr.ref = f;
            return;
        }
        if (reserved(expr.name))
            error(diags, expr.span, "built-in '" + expr.name + "' is not supported", codes::kUnsupported);
        else
            error(diags, expr.span, "unknown name '" + expr.name + "'", codes::kUnknownName);
        return;
    }
    for (auto& k : expr.kids) resolve_expr(k, schema, vars, diags);
}

void resolve_formula(Formula& formula, const Schema& schema, std::vector<std::string>& vars,
                     std::vector<Diagnostic>& diags) {
    if (formula.kind == FormulaKind::Quant) {
        size_t base = vars.size();
        for (auto& d : formula.decls) {
            resolve_expr(d.domain, schema, vars, diags);
            d.slot = static_cast<int>(vars.size());
            vars.push_back(d.name);
        }
        for (auto& k : formula.kids) resolve_formula(k, schema, vars, diags);
        vars.resize(base);
        return;
    }
    for (auto& e : formula.exprs) resolve_expr(e, schema, vars, diags);
    for (auto& k : formula.kids) resolve_formula(k, schema, vars, diags);
}

void resolve_model(Model& model, std::vector<Diagnostic>& diags) {
    // Sigs and fields share one namespace.
    std::set<std::string> names;
    for (const auto& sig : model.sigs) {
        if (!names.insert(sig.name).second)
            error(diags, sig.name_span, "duplicate name '" + sig.name + "'", codes::kDuplicateName);
        for (const auto& f : sig.fields)
            if (!names.insert(f.name).second)
                error(diags, f.name_span, "duplicate name '" + f.name + "'", codes::kDuplicateName);
    }
    std::set<std::string> blocks;
    for (const auto& b : model.facts)
        if (b.named && !blocks.insert(b.name).second)
            error(diags, b.name_span, "duplicate fact name '" + b.name + "'", codes::kDuplicateName);
    std::set<std::string> preds;
    for (const auto& b : model.preds)
        if (!preds.insert(b.name).second)
            error(diags, b.name_span, "duplicate predicate name '" + b.name + "'", codes::kDuplicateName);

    Schema schema = Schema::build(model);

    for (size_t i = 0; i < model.sigs.size(); ++i) {
        const auto& sig = model.sigs[i];
        if (sig.kind == SigKind::Top) continue;
        int parent = schema.find_sig(sig.parent);
        if (parent < 0) {
            error(diags, sig.parent_span, "unknown signature '" + sig.parent + "'", codes::kUnknownName);
            continue;
        }
        if (sig.kind == SigKind::Extends && schema.sigs[parent].kind == SigKind::In)
            error(diags, sig.parent_span, "cannot extend subset signature '" + sig.parent + "'", codes::kType);
        int cur = parent;
        for (size_t steps = 0; cur >= 0 && steps <= model.sigs.size(); ++steps) {
            if (cur == static_cast<int>(i)) {
                error(diags, sig.name_span, "signature hierarchy cycle through '" + sig.name + "'",
                      codes::kCyclicHierarchy);
                break;
            }
            cur = schema.sigs[cur].parent;
        }
    }
    for (const auto& sig : model.sigs) {
        for (const auto& f : sig.fields) {
            if (f.ternary && schema.find_sig(f.mid) < 0)
                error(diags, f.mid_span, "unknown signature '" + f.mid + "'", codes::kUnknownName);
            if (schema.find_sig(f.target) < 0)
                error(diags, f.target_span, "unknown signature '" + f.target + "'", codes::kUnknownName);
        }
    }

    std::vector<std::string> vars;
    for (auto& b : model.facts)
        for (auto& f : b.body) resolve_formula(f, schema, vars, diags);
    for (auto& b : model.preds)
        for (auto& f : b.body) resolve_formula(f, schema, vars, diags);
    for (auto& c : model.commands) {
        if (c.has_inline) {
            for (auto& f : c.inline_body.body) resolve_formula(f, schema, vars, diags);
        } else if (!preds.count(c.pred)) {
            error(diags, c.pred_span, "unknown predicate '" + c.pred + "'", codes::kUnknownName);
        }
        if (c.scope.default_bound < 0)
            error(diags, c.span, "scope bounds must be non-negative", codes::kSyntax);
        for (const auto& [name, bound] : c.scope.per_sig) {
            int s = schema.find_sig(name);
            if (s < 0)
                error(diags, c.span, "unknown signature '" + name + "' in scope", codes::kUnknownName);
            else if (schema.sigs[s].kind != SigKind::Top)
                error(diags, c.span, "scope bounds apply to top-level signatures only ('" + name + "')",
                      codes::kType);
            if (bound < 0) error(diags, c.span, "scope bounds must be non-negative", codes::kSyntax);
        }
    }
}

}  // namespace livemodel::detail
