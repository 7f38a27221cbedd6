#include "livemodel/ast.hpp"

#include "livemodel/diagnostic.hpp"

namespace livemodel {

bool same_structure(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    if (a.is_ref() && a.name != b.name) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!same_structure(a.kids[i], b.kids[i])) return false;
    return true;
}

bool same_structure(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.exprs.size() != b.exprs.size() || a.kids.size() != b.kids.size() ||
        a.decls.size() != b.decls.size())
        return false;
    if ((a.kind == FormulaKind::Quant || a.kind == FormulaKind::Mult) && a.quant != b.quant) return false;
    for (size_t i = 0; i < a.decls.size(); ++i) {
        if (a.decls[i].name != b.decls[i].name) return false;
        if (!same_structure(a.decls[i].domain, b.decls[i].domain)) return false;
    }
    for (size_t i = 0; i < a.exprs.size(); ++i)
        if (!same_structure(a.exprs[i], b.exprs[i])) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!same_structure(a.kids[i], b.kids[i])) return false;
    return true;
}

namespace {

bool same_block(const Block& a, const Block& b) {
    if (a.named != b.named || (a.named && a.name != b.name) || a.body.size() != b.body.size()) return false;
    for (size_t i = 0; i < a.body.size(); ++i)
        if (!same_structure(a.body[i], b.body[i])) return false;
    return true;
}

bool same_field(const FieldDecl& a, const FieldDecl& b) {
    return a.name == b.name && a.owner == b.owner && a.ternary == b.ternary &&
           (a.ternary || a.mult == b.mult) && a.mid == b.mid && a.target == b.target;
}

bool same_sig(const SigDecl& a, const SigDecl& b) {
    if (a.name != b.name || a.kind != b.kind || a.parent != b.parent || a.is_abstract != b.is_abstract ||
        a.mult != b.mult || a.fields.size() != b.fields.size())
        return false;
    for (size_t i = 0; i < a.fields.size(); ++i)
        if (!same_field(a.fields[i], b.fields[i])) return false;
    return true;
}

}  // namespace

bool same_structure(const Model& a, const Model& b) {
    if (a.sigs.size() != b.sigs.size() || a.facts.size() != b.facts.size() || a.preds.size() != b.preds.size() ||
        a.commands.size() != b.commands.size())
        return false;
    for (size_t i = 0; i < a.sigs.size(); ++i)
        if (!same_sig(a.sigs[i], b.sigs[i])) return false;
    for (size_t i = 0; i < a.facts.size(); ++i)
        if (!same_block(a.facts[i], b.facts[i])) return false;
    for (size_t i = 0; i < a.preds.size(); ++i)
        if (!same_block(a.preds[i], b.preds[i])) return false;
    for (size_t i = 0; i < a.commands.size(); ++i) {
        const Command& x = a.commands[i];
        const Command& y = b.commands[i];
        if (x.pred != y.pred || x.has_inline != y.has_inline || !(x.scope == y.scope)) return false;
        if (x.has_inline && !same_block(x.inline_body, y.inline_body)) return false;
    }
    return true;
}

Formula conjunction(const std::vector<Formula>& body) {
    if (body.empty()) return Formula{};
    Formula acc = body.front();
    for (size_t i = 1; i < body.size(); ++i) acc = conjoin(std::move(acc), body[i]);
    return acc;
}

Formula negation(Formula f) {
    Formula n;
    n.kind = FormulaKind::Not;
    n.span = f.span;
    n.kids.push_back(std::move(f));
    return n;
}

Formula conjoin(Formula a, Formula b) {
    Formula f;
    f.kind = FormulaKind::And;
    f.span = cover(a.span, b.span);
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::StructuralMismatch: return "StructuralMismatch";
        case ErrorCode::ScopeTooLarge: return "ScopeTooLarge";
        case ErrorCode::Cancelled: return "Cancelled";
        case ErrorCode::UnboundVariable: return "UnboundVariable";
        case ErrorCode::VacuousPrefix: return "VacuousPrefix";
        case ErrorCode::NoPrefixContext: return "NoPrefixContext";
        case ErrorCode::SessionNotFound: return "SessionNotFound";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

}  // namespace livemodel
