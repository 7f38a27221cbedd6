#include <algorithm>

#include "livemodel/lang.hpp"
#include "syntax.hpp"

namespace livemodel {

namespace {

constexpr int kMaxExprArity = 6;

struct TypeFailure {};

class Typer {
public:
    Typer(const Schema& schema, std::vector<RelType>& slots, std::vector<Diagnostic>& diags)
        : schema_(schema), slots_(slots), diags_(diags) {}

    void expr(Expr& e) {
        for (auto& k : e.kids) expr(k);
        e.type = compute(e);
        if (e.type.vacuous() && !e.is_ref()) {
            bool origin = std::none_of(e.kids.begin(), e.kids.end(), [](const Expr& k) { return k.type.vacuous(); });
            if (origin)
                diags_.push_back({Severity::Warning, e.span,
                                  "expression '" + to_text(e) + "' is always empty (types do not overlap)",
                                  codes::kVacuousJoin, {}});
        }
    }

    void formula(Formula& f) {
        switch (f.kind) {
            case FormulaKind::True:
                return;
            case FormulaKind::Mult:
                guarded(f.exprs[0]);
                return;
            case FormulaKind::Subset:
            case FormulaKind::Equal: {
                bool ok = guarded(f.exprs[0]);
                ok = guarded(f.exprs[1]) && ok;
                if (ok && f.exprs[0].type.arity != f.exprs[1].type.arity)
                    diags_.push_back({Severity::Error, f.span,
                                      "operands of '" + std::string(f.kind == FormulaKind::Subset ? "in" : "=") +
                                          "' have different arities (" + std::to_string(f.exprs[0].type.arity) +
                                          " and " + std::to_string(f.exprs[1].type.arity) + ")",
                                      codes::kType, {}});
                return;
            }
            case FormulaKind::Quant:
                for (auto& d : f.decls) {
                    RelType t;
                    if (guarded(d.domain)) {
                        t = d.domain.type;
                        if (t.arity != 1) {
                            diags_.push_back({Severity::Error, d.domain.span,
                                              "quantifier domain must be a set (arity 1), found arity " +
                                                  std::to_string(t.arity),
                                              codes::kArity, {}});
                            t = RelType{1, {}};
                        }
                    } else {
                        t = RelType{1, {}};
                    }
                    if (static_cast<int>(slots_.size()) <= d.slot) slots_.resize(d.slot + 1);
                    slots_[d.slot] = t;
                }
                for (auto& k : f.kids) formula(k);
                return;
            default:
                for (auto& k : f.kids) formula(k);
                return;
        }
    }

    bool guarded(Expr& e) {
        try {
            expr(e);
            return true;
        } catch (const TypeFailure&) {
            return false;
        }
    }

private:
    const Schema& schema_;
    std::vector<RelType>& slots_;
    std::vector<Diagnostic>& diags_;

    [[noreturn]] void fail(const Expr& e, const std::string& message, const char* code = codes::kArity) {
        diags_.push_back({Severity::Error, e.span, message, code, {}});
        throw TypeFailure{};
    }

    void require_same_arity(const Expr& e, const char* op) {
        if (e.kids[0].type.arity != e.kids[1].type.arity)
            fail(e, std::string("operands of '") + op + "' have different arities (" +
                        std::to_string(e.kids[0].type.arity) + " and " + std::to_string(e.kids[1].type.arity) + ")");
    }

    void require_binary(const Expr& e, const char* op) {
        if (e.kids[0].type.arity != 2)
            fail(e, std::string("'") + op + "' requires a binary relation, found arity " +
                        std::to_string(e.kids[0].type.arity));
    }

    RelType closure_of(const RelType& r) const {
        RelType out = r;
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<std::vector<int>> add;
            for (const auto& p : out.products)
                for (const auto& q : out.products)
                    if (schema_.may_overlap(p[1], q[0])) {
                        std::vector<int> t{p[0], q[1]};
                        if (!out.products.count(t)) add.push_back(t);
                    }
            for (auto& t : add) grew |= out.products.insert(std::move(t)).second;
        }
        return out;
    }

    RelType compute(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident:
                fail(e, "unresolved name '" + e.name + "'", codes::kUnknownName);
            case ExprKind::SigRef:
                return RelType{1, {{e.ref}}};
            case ExprKind::FieldRef:
                return RelType{schema_.fields[e.ref].arity(), {schema_.fields[e.ref].columns}};
            case ExprKind::VarRef:
                if (e.ref < 0 || e.ref >= static_cast<int>(slots_.size())) fail(e, "unbound variable '" + e.name + "'");
                return slots_[e.ref];
            case ExprKind::Union: {
                require_same_arity(e, "+");
                RelType t = e.kids[0].type;
                t.products.insert(e.kids[1].type.products.begin(), e.kids[1].type.products.end());
                return t;
            }
            case ExprKind::Diff:
                require_same_arity(e, "-");
                return e.kids[0].type;
            case ExprKind::Intersect: {
                require_same_arity(e, "&");
                RelType t{e.kids[0].type.arity, {}};
                for (const auto& p : e.kids[0].type.products)
                    for (const auto& q : e.kids[1].type.products) {
                        std::vector<int> m(p.size());
                        bool ok = true;
                        for (size_t i = 0; i < p.size() && ok; ++i) {
                            ok = schema_.may_overlap(p[i], q[i]);
                            m[i] = schema_.meet(p[i], q[i]);
                        }
                        if (ok) t.products.insert(std::move(m));
                    }
                return t;
            }
            case ExprKind::Join: {
                const RelType& a = e.kids[0].type;
                const RelType& b = e.kids[1].type;
                int arity = a.arity + b.arity - 2;
                if (arity < 1) fail(e, "join of '" + to_text(e.kids[0]) + "' and '" + to_text(e.kids[1]) +
                                           "' has arity 0");
                if (arity > kMaxExprArity) fail(e, "expression arity exceeds " + std::to_string(kMaxExprArity));
                RelType t{arity, {}};
                for (const auto& p : a.products)
                    for (const auto& q : b.products)
                        if (schema_.may_overlap(p.back(), q.front())) {
                            std::vector<int> r(p.begin(), p.end() - 1);
                            r.insert(r.end(), q.begin() + 1, q.end());
                            t.products.insert(std::move(r));
                        }
                return t;
            }
            case ExprKind::Product: {
                int arity = e.kids[0].type.arity + e.kids[1].type.arity;
                if (arity > kMaxExprArity) fail(e, "expression arity exceeds " + std::to_string(kMaxExprArity));
                RelType t{arity, {}};
                for (const auto& p : e.kids[0].type.products)
                    for (const auto& q : e.kids[1].type.products) {
                        std::vector<int> r = p;
                        r.insert(r.end(), q.begin(), q.end());
                        t.products.insert(std::move(r));
                    }
                return t;
            }
            case ExprKind::Closure:
                require_binary(e, "^");
                return closure_of(e.kids[0].type);
            case ExprKind::ReflClosure: {
                require_binary(e, "*");
                RelType t = closure_of(e.kids[0].type);
                for (const auto& p : e.kids[0].type.products) {
                    t.products.insert({p[0], p[0]});
                    t.products.insert({p[1], p[1]});
                }
                return t;
            }
            case ExprKind::Transpose: {
                require_binary(e, "~");
                RelType t{2, {}};
                for (const auto& p : e.kids[0].type.products) t.products.insert({p[1], p[0]});
                return t;
            }
        }
        fail(e, "unknown expression");
    }
};

}  // namespace

namespace detail {

void type_formula(Formula& formula, const Schema& schema, std::vector<RelType>& slot_types,
                  std::vector<Diagnostic>& diags) {
    Typer typer(schema, slot_types, diags);
    typer.formula(formula);
}

}  // namespace detail

std::vector<Diagnostic> type_expr(Expr& expr, const Schema& schema, const std::vector<RelType>& slot_types) {
    std::vector<Diagnostic> diags;
    std::vector<RelType> slots = slot_types;
    Typer typer(schema, slots, diags);
    typer.guarded(expr);
    return diags;
}

ParseResult parse(std::string_view text) {
    ParseResult result;
    Model model = detail::parse_syntax(text, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    detail::resolve_model(model, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    result.model = std::move(model);
    return result;
}

TypecheckResult typecheck(Model model) {
    TypecheckResult result;
    auto schema = std::make_shared<Schema>(Schema::build(model));
    std::vector<RelType> slots;
    auto run = [&](Block& b) {
        for (auto& f : b.body) detail::type_formula(f, *schema, slots, result.diagnostics);
    };
    for (auto& b : model.facts) run(b);
    for (auto& b : model.preds) run(b);
    for (auto& c : model.commands)
        if (c.has_inline) run(c.inline_body);
    if (has_errors(result.diagnostics)) return result;
    auto typed = std::make_shared<TypedModel>();
    typed->model = std::move(model);
    typed->schema = std::move(schema);
    typed->warnings = result.diagnostics;
    result.model = std::move(typed);
    return result;
}

TypecheckResult compile(std::string_view text) {
    ParseResult parsed = parse(text);
    if (!parsed.model) return TypecheckResult{nullptr, std::move(parsed.diagnostics)};
    TypecheckResult typed = typecheck(std::move(*parsed.model));
    parsed.diagnostics.insert(parsed.diagnostics.end(), typed.diagnostics.begin(), typed.diagnostics.end());
    typed.diagnostics = std::move(parsed.diagnostics);
    return typed;
}

ExprResult parse_expr(std::string_view text, const TypedModel& model, const std::vector<ScopedVar>& vars) {
    ExprResult result;
    auto e = detail::parse_expr_syntax(text, result.diagnostics);
    if (!e) return result;
    std::vector<std::string> names;
    std::vector<RelType> types;
    for (const auto& v : vars) {
        names.push_back(v.name);
        types.push_back(v.type);
    }
    detail::resolve_expr(*e, *model.schema, names, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    auto diags = type_expr(*e, *model.schema, types);
    result.diagnostics.insert(result.diagnostics.end(), diags.begin(), diags.end());
    if (has_errors(result.diagnostics)) return result;
    result.expr = std::move(*e);
    return result;
}

FormulaResult parse_formula(std::string_view text, const TypedModel& model, const std::vector<ScopedVar>& free) {
    FormulaResult result;
    auto f = detail::parse_formula_syntax(text, result.diagnostics);
    if (!f) return result;
    std::vector<std::string> vars;
    std::vector<RelType> slots;
    for (const auto& v : free) {
        vars.push_back(v.name);
        slots.push_back(v.type);
    }
    detail::resolve_formula(*f, *model.schema, vars, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    detail::type_formula(*f, *model.schema, slots, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    result.formula = std::move(*f);
    return result;
}

const Block* TypedModel::find_pred(std::string_view name) const {
    for (const auto& p : model.preds)
        if (p.name == name) return &p;
    return nullptr;
}

Formula TypedModel::facts() const {
    std::vector<Formula> all;
    for (const auto& b : model.facts)
        for (const auto& f : b.body) all.push_back(f);
    return conjunction(all);
}

Formula TypedModel::command_goal(size_t index) const {
    const Command& c = model.commands.at(index);
    if (c.has_inline) return conjunction(c.inline_body.body);
    const Block* p = find_pred(c.pred);
    return p ? conjunction(p->body) : Formula{};
}

ScopeSpec TypedModel::command_scope(size_t index) const { return model.commands.at(index).scope; }

}  // namespace livemodel
