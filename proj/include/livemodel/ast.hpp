#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace livemodel {

/// Half-open byte range [begin, end) into the model source text.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;

    bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
    bool operator==(const Span&) const = default;
};

inline Span cover(const Span& a, const Span& b) {
    return {a.begin < b.begin ? a.begin : b.begin, a.end > b.end ? a.end : b.end};
}

/// Relational type: a set of same-arity products of declared sig ids.
/// An empty product set means the expression is empty in every instance.
struct RelType {
    int arity = 0;
    std::set<std::vector<int>> products;

    bool vacuous() const { return products.empty(); }
    bool operator==(const RelType&) const = default;
};

enum class ExprKind {
    Ident,  // unresolved name, only present before resolution
    SigRef,
    FieldRef,
    VarRef,
    Union,
    Diff,
    Intersect,
    Join,
    Product,
    Closure,
    ReflClosure,
    Transpose,
};

struct Expr {
    ExprKind kind = ExprKind::Ident;
    std::string name;  // for references
    int ref = -1;      // sig id, field id, or variable slot once resolved
    std::vector<Expr> kids;
    Span span;
    RelType type;  // filled in by typecheck

    bool is_ref() const {
        return kind == ExprKind::Ident || kind == ExprKind::SigRef || kind == ExprKind::FieldRef ||
               kind == ExprKind::VarRef;
    }
    bool is_unary() const {
        return kind == ExprKind::Closure || kind == ExprKind::ReflClosure || kind == ExprKind::Transpose;
    }
};

enum class FormulaKind { True, Mult, Subset, Equal, Not, And, Or, Implies, Iff, Quant };

/// Shared by quantifiers and multiplicity formulas (Mult never uses All).
enum class Quantifier { All, Some, No, Lone, One };

struct Formula;

struct VarDecl {
    std::string name;
    Expr domain;
    Span span;
    int slot = -1;
};

struct Formula {
    FormulaKind kind = FormulaKind::True;
    Quantifier quant = Quantifier::All;
    std::vector<Expr> exprs;
    std::vector<Formula> kids;
    std::vector<VarDecl> decls;  // Quant only
    Span span;
};

enum class SigKind { Top, Extends, In };
enum class SigMult { Default, One, Lone, Some };
enum class FieldMult { Set, Lone, One, Some };

struct FieldDecl {
    std::string name;
    std::string owner;
    bool ternary = false;
    FieldMult mult = FieldMult::Set;  // binary fields only
    std::string mid;                  // ternary fields only
    std::string target;
    Span span;
    Span name_span;
    Span mid_span;
    Span target_span;
};

struct SigDecl {
    std::string name;
    SigKind kind = SigKind::Top;
    std::string parent;
    bool is_abstract = false;
    SigMult mult = SigMult::Default;
    std::vector<FieldDecl> fields;
    Span span;
    Span name_span;
    Span parent_span;
};

/// A fact or predicate block; the body is an implicit conjunction.
struct Block {
    std::string name;
    bool named = true;
    std::vector<Formula> body;
    Span span;
    Span name_span;
};

struct ScopeSpec {
    int default_bound = 3;
    std::vector<std::pair<std::string, int>> per_sig;

    bool operator==(const ScopeSpec&) const = default;
};

struct Command {
    std::string pred;  // empty when the command carries an inline body
    bool has_inline = false;
    Block inline_body;
    ScopeSpec scope;
    Span span;
    Span pred_span;
};

struct Model {
    std::vector<SigDecl> sigs;
    std::vector<Block> facts;
    std::vector<Block> preds;
    std::vector<Command> commands;
};

/// Structural equality: ignores spans, types, and resolution slots.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Formula& a, const Formula& b);
bool same_structure(const Model& a, const Model& b);

/// Visits every expression and formula node in preorder.
template <class ExprFn>
void for_each_expr(const Expr& e, ExprFn&& fn) {
    fn(e);
    for (const auto& k : e.kids) for_each_expr(k, fn);
}

template <class FormulaFn, class ExprFn>
void for_each_node(const Formula& f, FormulaFn&& ffn, ExprFn&& efn) {
    ffn(f);
    for (const auto& d : f.decls) for_each_expr(d.domain, efn);
    for (const auto& e : f.exprs) for_each_expr(e, efn);
    for (const auto& k : f.kids) for_each_node(k, ffn, efn);
}

/// Conjunction of a block body (True when empty).
Formula conjunction(const std::vector<Formula>& body);
Formula negation(Formula f);
Formula conjoin(Formula a, Formula b);

}  // namespace livemodel
