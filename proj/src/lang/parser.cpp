#include <string>

#include "lexer.hpp"
#include "syntax.hpp"

namespace livemodel::detail {

namespace {

struct SyntaxFailure {};
struct Backtrack {};

class Parser {
public:
    Parser(std::string_view text, std::vector<Diagnostic>& diags) : diags_(diags) { toks_ = lex(text, diags); }

    Model parse_model() {
        Model model;
        while (!at(Tok::End)) {
            try {
                parse_statement(model);
            } catch (const SyntaxFailure&) {
                recover();
            }
        }
        return model;
    }

    std::optional<Expr> parse_expr_only() {
        try {
            Expr e = parse_expr();
            if (!at(Tok::End)) fail("unexpected " + std::string(describe(peek().kind)), {"end of expression"});
            return e;
        } catch (const SyntaxFailure&) {
            return std::nullopt;
        }
    }

    std::optional<Formula> parse_formula_only() {
        try {
            Formula f;
            std::vector<Formula> body;
            while (!at(Tok::End)) body.push_back(parse_formula());
            if (body.empty()) fail("expected a formula", {"formula"});
            if (body.size() == 1) return std::move(body.front());
            return conjunction(body);
        } catch (const SyntaxFailure&) {
            return std::nullopt;
        }
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
    int speculating_ = 0;
    size_t unnamed_facts_ = 0;

    const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_kw(std::string_view w, size_t k = 0) const {
        return peek(k).kind == Tok::Ident && peek(k).text == w;
    }
    bool at_name(size_t k = 0) const { return peek(k).kind == Tok::Ident && !is_keyword(peek(k).text); }
    Token take() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& message, std::vector<std::string> expected,
                           const char* code = codes::kSyntax) {
        if (speculating_ > 0) throw Backtrack{};
        diags_.push_back({Severity::Error, peek().span, message, code, std::move(expected)});
        throw SyntaxFailure{};
    }

    [[noreturn]] void unsupported(const Token& t, const std::string& message) {
        if (speculating_ > 0) throw Backtrack{};
        diags_.push_back({Severity::Error, t.span, message, codes::kUnsupported, {}});
        throw SyntaxFailure{};
    }

    void check_supported(const Token& t) {
        if (t.kind == Tok::Prime) unsupported(t, "primed relations are not supported (static fragment only)");
        if (t.kind == Tok::Hash) unsupported(t, "integer expressions are not supported");
        if (t.kind == Tok::Int) unsupported(t, "integer expressions are not supported");
        if (t.kind == Tok::Ident && is_temporal_keyword(t.text))
            unsupported(t, "temporal keyword '" + t.text + "' is not supported (static fragment only)");
    }

    Token expect(Tok k) {
        if (!at(k)) {
            check_supported(peek());
            fail("expected " + std::string(describe(k)) + ", found " + found(), {describe(k)});
        }
        return take();
    }

    Token expect_kw(std::string_view w) {
        if (!at_kw(w)) fail("expected '" + std::string(w) + "', found " + found(), {"'" + std::string(w) + "'"});
        return take();
    }

    Token expect_name(const char* what) {
        if (!at_name()) {
            check_supported(peek());
            fail(std::string("expected ") + what + ", found " + found(), {what});
        }
        return take();
    }

    std::string found() const {
        const Token& t = peek();
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    bool at_statement_start() const {
        if (at_kw("sig") || at_kw("abstract") || at_kw("fact") || at_kw("pred") || at_kw("run")) return true;
        if ((at_kw("one") || at_kw("lone") || at_kw("some")) && at_kw("sig", 1)) return true;
        return at_kw("var") && at_kw("sig", 1);
    }

    void recover() {
        take();
        while (!at(Tok::End)) {
            bool after_brace = pos_ > 0 && toks_[pos_ - 1].kind == Tok::RBrace;
            if (at_statement_start() && (peek().line_start || after_brace)) return;
            take();
        }
    }

    // ---- statements --------------------------------------------------------

    void parse_statement(Model& model) {
        if (at_kw("fact")) {
            model.facts.push_back(parse_fact());
        } else if (at_kw("pred")) {
            model.preds.push_back(parse_pred());
        } else if (at_kw("run")) {
            model.commands.push_back(parse_run());
        } else if (at_kw("sig") || at_kw("abstract") || at_kw("one") || at_kw("lone") || at_kw("some") ||
                   at_kw("var")) {
            model.sigs.push_back(parse_sig());
        } else {
            const Token& t = peek();
            if (t.kind == Tok::Ident &&
                (t.text == "module" || t.text == "open" || t.text == "fun" || t.text == "assert" ||
                 t.text == "check" || t.text == "let" || t.text == "enum"))
                unsupported(t, "'" + t.text + "' declarations are not supported");
            fail("expected a declaration, found " + found(), {"'sig'", "'fact'", "'pred'", "'run'"});
        }
    }

    SigDecl parse_sig() {
        SigDecl sig;
        sig.span.begin = peek().span.begin;
        bool seen_mult = false;
        while (!at_kw("sig")) {
            if (at_kw("var")) unsupported(peek(), "'var' signatures are not supported (static fragment only)");
            if (at_kw("abstract") && !sig.is_abstract) {
                take();
                sig.is_abstract = true;
            } else if (!seen_mult && (at_kw("one") || at_kw("lone") || at_kw("some"))) {
                std::string m = take().text;
                sig.mult = m == "one" ? SigMult::One : m == "lone" ? SigMult::Lone : SigMult::Some;
                seen_mult = true;
            } else {
                fail("expected 'sig', found " + found(), {"'sig'"});
            }
        }
        take();
        Token name = expect_name("signature name");
        sig.name = name.text;
        sig.name_span = name.span;
        if (at_kw("extends") || at_kw("in")) {
            sig.kind = take().text == "extends" ? SigKind::Extends : SigKind::In;
            Token parent = expect_name("parent signature name");
            sig.parent = parent.text;
            sig.parent_span = parent.span;
        }
        if (at(Tok::Comma)) unsupported(peek(), "declaring several signatures at once is not supported");
        expect(Tok::LBrace);
        if (!at(Tok::RBrace)) {
            sig.fields.push_back(parse_field(sig.name));
            while (at(Tok::Comma)) {
                take();
                sig.fields.push_back(parse_field(sig.name));
            }
        }
        sig.span.end = expect(Tok::RBrace).span.end;
        return sig;
    }

    FieldDecl parse_field(const std::string& owner) {
        FieldDecl field;
        field.owner = owner;
        Token name = expect_name("field name");
        field.name = name.text;
        field.name_span = name.span;
        field.span = name.span;
        expect(Tok::Colon);
        if (at_kw("var")) unsupported(peek(), "'var' fields are not supported (static fragment only)");
        bool has_mult = false;
        if (at_kw("set") || at_kw("lone") || at_kw("one") || at_kw("some")) {
            std::string m = take().text;
            field.mult = m == "set" ? FieldMult::Set : m == "lone" ? FieldMult::Lone
                         : m == "one" ? FieldMult::One : FieldMult::Some;
            has_mult = true;
        }
        Token first = expect_name("signature name");
        field.target = first.text;
        field.target_span = first.span;
        field.span.end = first.span.end;
        if (at(Tok::Arrow)) {
            if (has_mult) unsupported(peek(), "multiplicities on ternary fields are not supported");
            take();
            if (at_kw("set") || at_kw("lone") || at_kw("one") || at_kw("some"))
                unsupported(peek(), "multiplicities on ternary fields are not supported");
            Token second = expect_name("signature name");
            field.ternary = true;
            field.mid = field.target;
            field.mid_span = field.target_span;
            field.target = second.text;
            field.target_span = second.span;
            field.span.end = second.span.end;
            if (at(Tok::Arrow)) unsupported(peek(), "field arity is limited to 3");
        }
        return field;
    }

    Block parse_block_body(Block block) {
        expect(Tok::LBrace);
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) fail("expected '}', found end of input", {"'}'"});
            block.body.push_back(parse_formula());
        }
        block.span.end = take().span.end;
        return block;
    }

    Block parse_fact() {
        Block b;
        b.span.begin = take().span.begin;
        ++unnamed_facts_;
        if (at_name()) {
            Token name = take();
            b.name = name.text;
            b.name_span = name.span;
        } else {
            b.named = false;
            b.name = "fact#" + std::to_string(unnamed_facts_);
            b.name_span = b.span;
        }
        return parse_block_body(std::move(b));
    }

    Block parse_pred() {
        Block b;
        b.span.begin = take().span.begin;
        Token name = expect_name("predicate name");
        b.name = name.text;
        b.name_span = name.span;
        if (at(Tok::LBracket) || at(Tok::LParen)) {
            Tok close = at(Tok::LBracket) ? Tok::RBracket : Tok::RParen;
            Token open = take();
            if (!at(close)) unsupported(open, "predicates take no parameters");
            take();
        }
        return parse_block_body(std::move(b));
    }

    int parse_int() {
        Token t = expect(Tok::Int);
        try {
            return std::stoi(t.text);
        } catch (...) {
            pos_--;
            fail("scope bound out of range", {"integer"});
        }
    }

    Command parse_run() {
        Command cmd;
        cmd.span = take().span;
        if (at(Tok::LBrace)) {
            cmd.has_inline = true;
            cmd.inline_body.name = "run#inline";
            cmd.inline_body.named = false;
            cmd.inline_body.span.begin = peek().span.begin;
            cmd.inline_body = parse_block_body(std::move(cmd.inline_body));
            cmd.span.end = cmd.inline_body.span.end;
        } else {
            Token name = expect_name("predicate name");
            cmd.pred = name.text;
            cmd.pred_span = name.span;
            cmd.span.end = name.span.end;
        }
        if (at_kw("for")) {
            take();
            if (at_kw("exactly", 1) || at_kw("exactly")) unsupported(peek(), "'exactly' scopes are not supported");
            int n = parse_int();
            cmd.span.end = toks_[pos_ - 1].span.end;
            if (at_name()) {
                // `for 2 State, 1 Event`
                cmd.scope.per_sig.emplace_back(take().text, n);
                while (at(Tok::Comma)) {
                    take();
                    int k = parse_int();
                    cmd.scope.per_sig.emplace_back(expect_name("signature name").text, k);
                }
            } else {
                cmd.scope.default_bound = n;
                if (at_kw("but")) {
                    take();
                    do {
                        if (at(Tok::Comma)) take();
                        int k = parse_int();
                        cmd.scope.per_sig.emplace_back(expect_name("signature name").text, k);
                    } while (at(Tok::Comma));
                }
            }
            cmd.span.end = toks_[pos_ - 1].span.end;
        }
        return cmd;
    }

    // ---- formulas ----------------------------------------------------------

    static Formula binary(FormulaKind kind, Formula a, Formula b) {
        Formula f;
        f.kind = kind;
        f.span = cover(a.span, b.span);
        f.kids.push_back(std::move(a));
        f.kids.push_back(std::move(b));
        return f;
    }

    Formula parse_formula() { return parse_iff(); }

    Formula parse_iff() {
        Formula lhs = parse_implies();
        while (at(Tok::Iff) || at_kw("iff")) {
            take();
            lhs = binary(FormulaKind::Iff, std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Formula parse_implies() {
        Formula lhs = parse_or();
        if (at(Tok::Implies) || at_kw("implies")) {
            take();
            return binary(FormulaKind::Implies, std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        while (at(Tok::OrOr) || at_kw("or")) {
            take();
            lhs = binary(FormulaKind::Or, std::move(lhs), parse_and());
        }
        return lhs;
    }

    Formula parse_and() {
        Formula lhs = parse_not();
        while (at(Tok::AndAnd) || at_kw("and")) {
            take();
            lhs = binary(FormulaKind::And, std::move(lhs), parse_not());
        }
        return lhs;
    }

    bool at_quant_start() const {
        if (!(at_kw("all") || at_kw("some") || at_kw("no") || at_kw("lone") || at_kw("one"))) return false;
        return at_name(1) && (peek(2).kind == Tok::Comma || peek(2).kind == Tok::Colon);
    }

    Formula parse_not() {
        if (at(Tok::Bang) || (at_kw("not") && !at_kw("in", 1))) {
            Token op = take();
            Formula inner = parse_not();
            Formula f;
            f.kind = FormulaKind::Not;
            f.span = cover(op.span, inner.span);
            f.kids.push_back(std::move(inner));
            return f;
        }
        if (at_quant_start()) return parse_quant();
        return parse_compare();
    }

    static Quantifier quant_of(const std::string& w) {
        if (w == "all") return Quantifier::All;
        if (w == "some") return Quantifier::Some;
        if (w == "no") return Quantifier::No;
        if (w == "lone") return Quantifier::Lone;
        return Quantifier::One;
    }

    Formula parse_quant() {
        Token kw = take();
        Formula f;
        f.kind = FormulaKind::Quant;
        f.quant = quant_of(kw.text);
        // decls := NAME ("," NAME)* ":" expr ("," decls)*
        while (true) {
            std::vector<Token> names;
            names.push_back(expect_name("variable name"));
            while (at(Tok::Comma)) {
                take();
                names.push_back(expect_name("variable name"));
            }
            expect(Tok::Colon);
            Expr domain = parse_expr();
            for (const auto& n : names) {
                VarDecl d;
                d.name = n.text;
                d.span = cover(n.span, domain.span);
                d.domain = domain;
                f.decls.push_back(std::move(d));
            }
            if (at(Tok::Comma) && at_name(1) && (peek(2).kind == Tok::Colon || peek(2).kind == Tok::Comma)) {
                take();
                continue;
            }
            break;
        }
        Formula body;
        if (at(Tok::LBrace)) {
            body = parse_brace_formula();
        } else {
            expect(Tok::Bar);
            body = parse_formula();
        }
        f.span = cover(kw.span, body.span);
        f.kids.push_back(std::move(body));
        return f;
    }

    Formula parse_brace_formula() {
        Token open = expect(Tok::LBrace);
        std::vector<Formula> body;
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) fail("expected '}', found end of input", {"'}'"});
            body.push_back(parse_formula());
        }
        Token close = take();
        Formula f = conjunction(body);
        if (body.empty()) f.span = cover(open.span, close.span);
        return f;
    }

    bool expr_continues() const {
        switch (peek().kind) {
            case Tok::Dot:
            case Tok::Plus:
            case Tok::Minus:
            case Tok::Amp:
            case Tok::Arrow:
            case Tok::Eq:
            case Tok::NotEq:
                return true;
            case Tok::Bang:
                return at_kw("in", 1);
            case Tok::Ident:
                return at_kw("in") || (at_kw("not") && at_kw("in", 1));
            default:
                return false;
        }
    }

    Formula parse_compare() {
        if (at_kw("no") || at_kw("some") || at_kw("lone") || at_kw("one")) {
            Token kw = take();
            Expr e = parse_expr();
            Formula f;
            f.kind = FormulaKind::Mult;
            f.quant = quant_of(kw.text);
            f.span = cover(kw.span, e.span);
            f.exprs.push_back(std::move(e));
            return f;
        }
        if (at(Tok::LBrace)) return parse_brace_formula();
        if (at(Tok::LParen)) {
            size_t saved = pos_;
            ++speculating_;
            try {
                Token open = take();
                Formula inner = parse_formula();
                Token close = expect(Tok::RParen);
                if (expr_continues()) throw Backtrack{};
                --speculating_;
                inner.span = cover(open.span, cover(inner.span, close.span));
                return inner;
            } catch (const Backtrack&) {
                --speculating_;
                pos_ = saved;
            }
        }
        check_supported(peek());
        Expr lhs = parse_expr();
        bool negate = false;
        FormulaKind kind;
        if (at_kw("in")) {
            take();
            kind = FormulaKind::Subset;
        } else if (at(Tok::Bang) && at_kw("in", 1)) {
            take();
            take();
            kind = FormulaKind::Subset;
            negate = true;
        } else if (at_kw("not") && at_kw("in", 1)) {
            take();
            take();
            kind = FormulaKind::Subset;
            negate = true;
        } else if (at(Tok::Eq)) {
            take();
            kind = FormulaKind::Equal;
        } else if (at(Tok::NotEq)) {
            take();
            kind = FormulaKind::Equal;
            negate = true;
        } else {
            check_supported(peek());
            fail("expected 'in' or '=' after expression, found " + found(), {"'in'", "'='", "'!in'", "'!='"});
        }
        Expr rhs = parse_expr();
        Formula f;
        f.kind = kind;
        f.span = cover(lhs.span, rhs.span);
        f.exprs.push_back(std::move(lhs));
        f.exprs.push_back(std::move(rhs));
        if (!negate) return f;
        Formula n;
        n.kind = FormulaKind::Not;
        n.span = f.span;
        n.kids.push_back(std::move(f));
        return n;
    }

    // ---- expressions -------------------------------------------------------

    static Expr bin(ExprKind kind, Expr a, Expr b) {
        Expr e;
        e.kind = kind;
        e.span = cover(a.span, b.span);
        e.kids.push_back(std::move(a));
        e.kids.push_back(std::move(b));
        return e;
    }

    Expr parse_expr() { return parse_union(); }

    Expr parse_union() {
        Expr lhs = parse_intersect();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            ExprKind k = take().kind == Tok::Plus ? ExprKind::Union : ExprKind::Diff;
            lhs = bin(k, std::move(lhs), parse_intersect());
        }
        return lhs;
    }

    Expr parse_intersect() {
        Expr lhs = parse_product();
        while (at(Tok::Amp)) {
            take();
            lhs = bin(ExprKind::Intersect, std::move(lhs), parse_product());
        }
        return lhs;
    }

    Expr parse_product() {
        Expr lhs = parse_join();
        while (at(Tok::Arrow)) {
            take();
            lhs = bin(ExprKind::Product, std::move(lhs), parse_join());
        }
        return lhs;
    }

    Expr parse_join() {
        Expr lhs = parse_unary();
        while (at(Tok::Dot)) {
            take();
            lhs = bin(ExprKind::Join, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    Expr parse_unary() {
        if (at(Tok::Caret) || at(Tok::Star) || at(Tok::Tilde)) {
            Token op = take();
            Expr inner = parse_unary();
            Expr e;
            e.kind = op.kind == Tok::Caret ? ExprKind::Closure
                     : op.kind == Tok::Star ? ExprKind::ReflClosure : ExprKind::Transpose;
            e.span = cover(op.span, inner.span);
            e.kids.push_back(std::move(inner));
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        if (at(Tok::LParen)) {
            Token open = take();
            Expr e = parse_expr();
            Token close = expect(Tok::RParen);
            e.span = cover(open.span, close.span);
            return e;
        }
        check_supported(peek());
        if (!at_name()) fail("expected an expression, found " + found(), {"name", "'('", "'^'", "'*'", "'~'"});
        Token name = take();
        check_supported(peek());
        Expr e;
        e.kind = ExprKind::Ident;
        e.name = name.text;
        e.span = name.span;
        return e;
    }
};

}  // namespace

Model parse_syntax(std::string_view text, std::vector<Diagnostic>& diags) {
    Parser p(text, diags);
    return p.parse_model();
}

std::optional<Expr> parse_expr_syntax(std::string_view text, std::vector<Diagnostic>& diags) {
    Parser p(text, diags);
    return p.parse_expr_only();
}

std::optional<Formula> parse_formula_syntax(std::string_view text, std::vector<Diagnostic>& diags) {
    Parser p(text, diags);
    return p.parse_formula_only();
}

}  // namespace livemodel::detail
