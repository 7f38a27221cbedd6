#include "livemodel/complete.hpp"

#include <algorithm>

#include "../lang/lexer.hpp"
#include "livemodel/diagnostic.hpp"

namespace livemodel {

namespace {

using detail::Tok;
using detail::Token;

bool in_comment(std::string_view text, size_t offset) {
    size_t i = 0;
    while (i + 1 < text.size()) {
        if (text[i] == '/' && text[i + 1] == '/') {
            size_t end = text.find('\n', i);
            if (end == std::string_view::npos) end = text.size();
            if (i < offset && offset <= end) return true;
            i = end;
        } else if (text[i] == '/' && text[i + 1] == '*') {
            size_t close = text.find("*/", i + 2);
            size_t end = close == std::string_view::npos ? text.size() : close + 2;
            if (i < offset && (offset < end || close == std::string_view::npos)) return true;
            i = end;
        } else {
            ++i;
        }
    }
    return false;
}

bool is_unary_tok(Tok t) { return t == Tok::Caret || t == Tok::Star || t == Tok::Tilde; }

bool is_quantifier(const Token& t) {
    return t.kind == Tok::Ident &&
           (t.text == "all" || t.text == "some" || t.text == "no" || t.text == "lone" || t.text == "one");
}

bool plain_ident(const Token& t) { return t.kind == Tok::Ident && !detail::is_keyword(t.text); }

[[noreturn]] void no_context(const std::string& why) { throw Error(ErrorCode::NoPrefixContext, why); }

// Index of the first token of the dot-chain ending at token j, or -1.
int chain_start(const std::vector<Token>& toks, int j) {
    while (true) {
        if (j < 0) return -1;
        int start = j;
        if (toks[j].kind == Tok::RParen) {
            int depth = 0;
            for (; start >= 0; --start) {
                if (toks[start].kind == Tok::RParen) ++depth;
                if (toks[start].kind == Tok::LParen && --depth == 0) break;
            }
            if (start < 0) return -1;
        } else if (!plain_ident(toks[j])) {
            return -1;
        }
        while (start > 0 && is_unary_tok(toks[start - 1].kind)) --start;
        if (start > 0 && toks[start - 1].kind == Tok::Dot) {
            j = start - 2;
            continue;
        }
        return start;
    }
}

std::string slice(std::string_view text, const std::vector<Token>& toks, int from, int to) {
    if (from > to) return {};
    size_t b = toks[from].span.begin;
    size_t e = toks[to].span.end;
    return std::string(text.substr(b, e - b));
}

// Quantifier variables whose scope covers token position `limit`.
std::vector<ScopedVar> scoped_vars(std::string_view text, const std::vector<Token>& toks, int limit,
                                   const TypedModel& model) {
    struct Entry {
        int depth;
        ScopedVar var;
    };
    std::vector<Entry> entries;
    auto current = [&] {
        std::vector<ScopedVar> vs;
        for (const auto& e : entries) vs.push_back(e.var);
        return vs;
    };
    int depth = 0;
    for (int i = 0; i < limit; ++i) {
        const Token& t = toks[i];
        if (t.kind == Tok::LBrace || t.kind == Tok::RBrace) {
            entries.clear();
            depth = 0;
            continue;
        }
        if (t.kind == Tok::LParen) {
            ++depth;
            continue;
        }
        if (t.kind == Tok::RParen) {
            std::erase_if(entries, [&](const Entry& e) { return e.depth >= depth; });
            depth = std::max(0, depth - 1);
            continue;
        }
        if (!is_quantifier(t) || i + 2 >= limit || !plain_ident(toks[i + 1])) continue;
        if (toks[i + 2].kind != Tok::Comma && toks[i + 2].kind != Tok::Colon) continue;
        // Declarations: names ':' domain (',' names ':' domain)* '|'
        int k = i + 1;
        std::vector<Entry> added;
        bool closed = false;
        while (k < limit) {
            std::vector<std::string> names;
            while (k < limit && plain_ident(toks[k])) {
                names.push_back(toks[k].text);
                ++k;
                if (k < limit && toks[k].kind == Tok::Comma) ++k;
                else break;
            }
            if (k >= limit || toks[k].kind != Tok::Colon || names.empty()) break;
            int dom_begin = ++k;
            int nest = 0;
            while (k < limit) {
                Tok kind = toks[k].kind;
                if (kind == Tok::LParen) ++nest;
                if (kind == Tok::RParen) --nest;
                if (nest == 0 && kind == Tok::Bar) break;
                if (nest == 0 && kind == Tok::Comma && k + 2 < limit && plain_ident(toks[k + 1]) &&
                    (toks[k + 2].kind == Tok::Colon || toks[k + 2].kind == Tok::Comma))
                    break;
                ++k;
            }
            if (k >= limit) break;
            std::vector<ScopedVar> outer = current();
            for (const auto& a : added) outer.push_back(a.var);
            auto dom = parse_expr(slice(text, toks, dom_begin, k - 1), model, outer);
            RelType type = dom.expr ? dom.expr->type : RelType{1, {}};
            for (const auto& n : names) added.push_back({depth, {n, type}});
            if (toks[k].kind == Tok::Bar) {
                closed = true;
                break;
            }
            ++k;
        }
        if (!closed) continue;
        for (auto& a : added) entries.push_back(std::move(a));
        i = k;
    }
    return current();
}

std::vector<RelType> slot_types(const CompletionContext& ctx) {
    std::vector<RelType> out;
    for (const auto& v : ctx.vars) out.push_back(v.type);
    return out;
}

bool vars_bound(const Expr& e, const Env& env) {
    bool ok = true;
    for_each_expr(e, [&](const Expr& x) {
        if (x.kind == ExprKind::VarRef && (x.ref < 0 || x.ref >= static_cast<int>(env.size()) || env[x.ref] == kNoAtom))
            ok = false;
    });
    return ok;
}

void annotate(SuggestionList& list, const Instance* inst, const Env& env) {
    for (auto& s : list.items) {
        s.value.reset();
        if (inst && vars_bound(s.full, env)) s.value = eval_expr(*inst, s.full, env);
    }
}

}  // namespace

CompletionContext prefix_context(std::string_view prefix, const TypedModel& model, const std::vector<ScopedVar>& vars) {
    auto r = parse_expr(prefix, model, vars);
    if (!r.expr) throw Error(ErrorCode::InvalidArgument, "prefix does not type-check: " + std::string(prefix));
    if (r.expr->type.vacuous())
        throw Error(ErrorCode::VacuousPrefix, "'" + std::string(prefix) + "' is empty in every instance");
    CompletionContext ctx;
    ctx.prefix = std::move(*r.expr);
    ctx.vars = vars;
    return ctx;
}

CompletionContext completion_context(std::string_view text, size_t offset, const TypedModel& model) {
    if (offset > text.size()) throw Error(ErrorCode::InvalidArgument, "cursor offset past the end of the text");
    if (in_comment(text, offset)) no_context("cursor is inside a comment");
    std::vector<Diagnostic> ignored;
    std::vector<Token> toks = detail::lex(text.substr(0, offset), ignored);
    while (!toks.empty() && toks.back().kind == Tok::End) toks.pop_back();

    CompletionContext ctx;
    ctx.replace = {static_cast<uint32_t>(offset), static_cast<uint32_t>(offset)};
    if (!toks.empty() && toks.back().kind == Tok::Ident && toks.back().span.end == offset) {
        ctx.partial = toks.back().text;
        ctx.replace = toks.back().span;
        toks.pop_back();
    }
    int n = static_cast<int>(toks.size());
    int dot = -1;
    if (n >= 1 && toks[n - 1].kind == Tok::Dot) {
        dot = n - 1;
        ctx.kind = CursorKind::AfterDot;
    } else if (n >= 2 && is_unary_tok(toks[n - 1].kind) && toks[n - 2].kind == Tok::Dot) {
        dot = n - 2;
        ctx.kind = CursorKind::AfterUnary;
        ctx.unary = toks[n - 1].kind == Tok::Caret  ? ExprKind::Closure
                    : toks[n - 1].kind == Tok::Star ? ExprKind::ReflClosure
                                                    : ExprKind::Transpose;
    } else {
        no_context("cursor does not follow a dot-expression");
    }
    int start = chain_start(toks, dot - 1);
    if (start < 0) no_context("no expression before the dot");

    ctx.vars = scoped_vars(text, toks, start, model);
    std::string prefix = slice(text, toks, start, dot - 1);
    auto r = parse_expr(prefix, model, ctx.vars);
    if (!r.expr) no_context("'" + prefix + "' does not type-check");
    if (r.expr->type.vacuous()) throw Error(ErrorCode::VacuousPrefix, "'" + prefix + "' is empty in every instance");
    ctx.prefix = std::move(*r.expr);
    return ctx;
}

SuggestionList suggest(const TypedModel& model, const CompletionContext& ctx, const Instance* inst, const Env& env) {
    if (ctx.prefix.type.vacuous())
        throw Error(ErrorCode::VacuousPrefix, "'" + to_text(ctx.prefix) + "' is empty in every instance");
    const Schema& schema = *model.schema;
    std::vector<RelType> slots = slot_types(ctx);

    auto extend = [&](Expr ref, std::optional<ExprKind> op) -> std::optional<Expr> {
        Expr rhs = std::move(ref);
        if (op) {
            Expr u;
            u.kind = *op;
            u.kids.push_back(std::move(rhs));
            rhs = std::move(u);
        }
        Expr full;
        full.kind = ExprKind::Join;
        full.kids.push_back(ctx.prefix);
        full.kids.push_back(std::move(rhs));
        auto diags = type_expr(full, schema, slots);
        for (const auto& d : diags)
            if (d.is_error()) return std::nullopt;
        if (full.type.vacuous()) return std::nullopt;
        return full;
    };
    auto field_ref = [&](int id) {
        Expr e;
        e.kind = ExprKind::FieldRef;
        e.name = schema.fields[id].name;
        e.ref = id;
        return e;
    };
    // Closure of a field that does not compose with itself is the field again.
    auto composes = [&](int id) {
        Expr e;
        e.kind = ExprKind::Join;
        e.kids.push_back(field_ref(id));
        e.kids.push_back(field_ref(id));
        for (const auto& d : type_expr(e, schema, {}))
            if (d.is_error()) return false;
        return !e.type.vacuous();
    };
    auto starts = [&](const std::string& name) { return name.compare(0, ctx.partial.size(), ctx.partial) == 0; };

    std::vector<int> fields(schema.fields.size());
    for (size_t i = 0; i < fields.size(); ++i) fields[i] = static_cast<int>(i);
    std::sort(fields.begin(), fields.end(),
              [&](int a, int b) { return schema.fields[a].name < schema.fields[b].name; });
    std::vector<int> sigs(schema.sigs.size());
    for (size_t i = 0; i < sigs.size(); ++i) sigs[i] = static_cast<int>(i);
    std::sort(sigs.begin(), sigs.end(), [&](int a, int b) { return schema.sigs[a].name < schema.sigs[b].name; });

    SuggestionList list;
    auto add = [&](std::string text, Expr full) {
        Suggestion s;
        s.text = std::move(text);
        s.type = full.type;
        s.full = std::move(full);
        list.items.push_back(std::move(s));
    };

    if (ctx.kind == CursorKind::AfterUnary) {
        for (int f : fields) {
            if (!starts(schema.fields[f].name)) continue;
            if (ctx.unary != ExprKind::Transpose && !composes(f)) continue;
            if (auto full = extend(field_ref(f), ctx.unary)) add(schema.fields[f].name, std::move(*full));
        }
    } else {
        for (int f : fields) {
            const std::string& name = schema.fields[f].name;
            if (!starts(name)) continue;
            auto plain = extend(field_ref(f), std::nullopt);
            if (!plain) continue;
            add(name, std::move(*plain));
            if (!composes(f)) continue;
            if (auto closure = extend(field_ref(f), ExprKind::Closure)) {
                add("^" + name, std::move(*closure));
                if (auto refl = extend(field_ref(f), ExprKind::ReflClosure)) add("*" + name, std::move(*refl));
            }
        }
        for (int s : sigs) {
            const std::string& name = schema.sigs[s].name;
            if (!starts(name)) continue;
            Expr ref;
            ref.kind = ExprKind::SigRef;
            ref.name = name;
            ref.ref = s;
            if (auto full = extend(std::move(ref), std::nullopt)) add(name, std::move(*full));
        }
    }
    if (list.items.size() > kMaxSuggestions) {
        list.items.resize(kMaxSuggestions);
        list.overflow = true;
    }
    for (size_t i = 0; i < list.items.size(); ++i) list.items[i].rank = static_cast<int>(i);
    if (inst) {
        Instance aligned = align(model, *inst);
        annotate(list, &aligned, env);
    }
    return list;
}

SuggestionList reannotate(const TypedModel& model, SuggestionList list, const Instance& inst, const Env& env) {
    Instance aligned = align(model, inst);
    validate_shape(aligned);
    annotate(list, &aligned, env);
    return list;
}

}  // namespace livemodel
