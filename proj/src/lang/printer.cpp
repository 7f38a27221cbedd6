#include <sstream>

#include "livemodel/lang.hpp"

namespace livemodel {

namespace {

int expr_prec(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Union:
        case ExprKind::Diff: return 1;
        case ExprKind::Intersect: return 2;
        case ExprKind::Product: return 3;
        case ExprKind::Join: return 4;
        case ExprKind::Closure:
        case ExprKind::ReflClosure:
        case ExprKind::Transpose: return 5;
        default: return 6;
    }
}

const char* expr_op(ExprKind k) {
    switch (k) {
        case ExprKind::Union: return " + ";
        case ExprKind::Diff: return " - ";
        case ExprKind::Intersect: return " & ";
        case ExprKind::Product: return " -> ";
        case ExprKind::Join: return ".";
        case ExprKind::Closure: return "^";
        case ExprKind::ReflClosure: return "*";
        case ExprKind::Transpose: return "~";
        default: return "";
    }
}

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
    int p = expr_prec(e);
    bool parens = p < min_prec;
    if (parens) os << '(';
    if (e.is_ref()) {
        os << e.name;
    } else if (e.is_unary()) {
        os << expr_op(e.kind);
        print_expr(os, e.kids[0], 5);
    } else {
        print_expr(os, e.kids[0], p);
        os << expr_op(e.kind);
        print_expr(os, e.kids[1], p + 1);
    }
    if (parens) os << ')';
}

const char* quant_word(Quantifier q) {
    switch (q) {
        case Quantifier::All: return "all";
        case Quantifier::Some: return "some";
        case Quantifier::No: return "no";
        case Quantifier::Lone: return "lone";
        case Quantifier::One: return "one";
    }
    return "all";
}

// Formula precedence: iff 1, implies 2, or 3, and 4, not 5, atoms 6, quantifiers 0.
int formula_prec(const Formula& f) {
    switch (f.kind) {
        case FormulaKind::Iff: return 1;
        case FormulaKind::Implies: return 2;
        case FormulaKind::Or: return 3;
        case FormulaKind::And: return 4;
        case FormulaKind::Not: {
            const Formula& k = f.kids[0];
            if (k.kind == FormulaKind::Subset || k.kind == FormulaKind::Equal) return 6;
            return 5;
        }
        case FormulaKind::Quant: return 0;
        default: return 6;
    }
}

void print_formula(std::ostream& os, const Formula& f, int min_prec) {
    int p = formula_prec(f);
    bool parens = p < min_prec;
    if (parens) os << '(';
    switch (f.kind) {
        case FormulaKind::True:
            os << "{}";
            break;
        case FormulaKind::Mult:
            os << quant_word(f.quant) << ' ';
            print_expr(os, f.exprs[0], 1);
            break;
        case FormulaKind::Subset:
        case FormulaKind::Equal:
            print_expr(os, f.exprs[0], 1);
            os << (f.kind == FormulaKind::Subset ? " in " : " = ");
            print_expr(os, f.exprs[1], 1);
            break;
        case FormulaKind::Not: {
            const Formula& k = f.kids[0];
            if (k.kind == FormulaKind::Subset || k.kind == FormulaKind::Equal) {
                print_expr(os, k.exprs[0], 1);
                os << (k.kind == FormulaKind::Subset ? " !in " : " != ");
                print_expr(os, k.exprs[1], 1);
            } else {
                os << '!';
                print_formula(os, k, 5);
            }
            break;
        }
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Iff: {
            const char* op = f.kind == FormulaKind::And ? " && " : f.kind == FormulaKind::Or ? " || " : " <=> ";
            print_formula(os, f.kids[0], p);
            os << op;
            print_formula(os, f.kids[1], p + 1);
            break;
        }
        case FormulaKind::Implies:
            print_formula(os, f.kids[0], p + 1);
            os << " => ";
            print_formula(os, f.kids[1], p);
            break;
        case FormulaKind::Quant: {
            os << quant_word(f.quant) << ' ';
            for (size_t i = 0; i < f.decls.size();) {
                size_t j = i + 1;
                while (j < f.decls.size() && same_structure(f.decls[j].domain, f.decls[i].domain)) ++j;
                if (i > 0) os << ", ";
                for (size_t k = i; k < j; ++k) os << (k > i ? ", " : "") << f.decls[k].name;
                os << " : ";
                print_expr(os, f.decls[i].domain, 1);
                i = j;
            }
            os << " | ";
            print_formula(os, f.kids[0], 0);
            break;
        }
    }
    if (parens) os << ')';
}

const char* field_mult(FieldMult m) {
    switch (m) {
        case FieldMult::Set: return "set";
        case FieldMult::Lone: return "lone";
        case FieldMult::One: return "one";
        case FieldMult::Some: return "some";
    }
    return "set";
}

void print_block_body(std::ostream& os, const Block& b) {
    if (b.body.empty()) {
        os << "{}\n";
        return;
    }
    os << "{\n";
    for (const auto& f : b.body) {
        os << "  ";
        print_formula(os, f, 0);
        os << '\n';
    }
    os << "}\n";
}

}  // namespace

std::string to_text(const Expr& expr) {
    std::ostringstream os;
    print_expr(os, expr, 0);
    return os.str();
}

std::string to_text(const Formula& formula) {
    std::ostringstream os;
    print_formula(os, formula, 0);
    return os.str();
}

std::string pretty_print(const Model& model) {
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
        if (!first) os << '\n';
        first = false;
    };
    for (const auto& sig : model.sigs) {
        sep();
        if (sig.is_abstract) os << "abstract ";
        if (sig.mult == SigMult::One) os << "one ";
        if (sig.mult == SigMult::Lone) os << "lone ";
        if (sig.mult == SigMult::Some) os << "some ";
        os << "sig " << sig.name;
        if (sig.kind == SigKind::Extends) os << " extends " << sig.parent;
        if (sig.kind == SigKind::In) os << " in " << sig.parent;
        if (sig.fields.empty()) {
            os << " {}\n";
            continue;
        }
        os << " {\n";
        for (size_t i = 0; i < sig.fields.size(); ++i) {
            const auto& f = sig.fields[i];
            os << "  " << f.name << ": ";
            if (f.ternary) os << f.mid << " -> " << f.target;
            else os << field_mult(f.mult) << ' ' << f.target;
            os << (i + 1 < sig.fields.size() ? ",\n" : "\n");
        }
        os << "}\n";
    }
    for (const auto& b : model.facts) {
        sep();
        os << "fact ";
        if (b.named) os << b.name << ' ';
        print_block_body(os, b);
    }
    for (const auto& b : model.preds) {
        sep();
        os << "pred " << b.name << ' ';
        print_block_body(os, b);
    }
    for (const auto& c : model.commands) {
        sep();
        os << "run ";
        if (c.has_inline) {
            std::ostringstream body;
            print_block_body(body, c.inline_body);
            std::string s = body.str();
            s.pop_back();
            os << s;
        } else {
            os << c.pred;
        }
        os << " for " << c.scope.default_bound;
        for (size_t i = 0; i < c.scope.per_sig.size(); ++i)
            os << (i == 0 ? " but " : ", ") << c.scope.per_sig[i].second << ' ' << c.scope.per_sig[i].first;
        os << '\n';
    }
    return os.str();
}

std::string render_type(const RelType& type, const Schema& schema) {
    if (type.products.empty()) return "{}";
    std::string out;
    bool first = true;
    for (const auto& p : type.products) {
        if (!first) out += " + ";
        first = false;
        for (size_t i = 0; i < p.size(); ++i) {
            if (i) out += "->";
            out += schema.sigs[p[i]].name;
        }
    }
    return out;
}

}  // namespace livemodel
