#include "livemodel/eval.hpp"

#include <algorithm>

#include "livemodel/diagnostic.hpp"

namespace livemodel {

namespace {

TupleSet join(const TupleSet& a, const TupleSet& b) {
    std::vector<Tuple> out;
    const auto& bt = b.tuples();
    for (const auto& x : a) {
        Atom key = x.back();
        auto lo = std::lower_bound(bt.begin(), bt.end(), key, [](const Tuple& t, Atom k) { return t[0] < k; });
        for (auto it = lo; it != bt.end() && (*it)[0] == key; ++it) out.push_back(join_tuples(x, *it));
    }
    return TupleSet::from(a.arity() + b.arity() - 2, std::move(out));
}

TupleSet product(const TupleSet& a, const TupleSet& b) {
    TupleSet r(a.arity() + b.arity());
    for (const auto& x : a)
        for (const auto& y : b) r.push_sorted(concat_tuples(x, y));
    return r;
}

TupleSet transpose(const TupleSet& r) {
    std::vector<Tuple> out;
    out.reserve(r.size());
    for (const auto& t : r) out.push_back(Tuple{t[1], t[0]});
    return TupleSet::from(2, std::move(out));
}

TupleSet closure(const TupleSet& r) {
    std::vector<Atom> atoms;
    for (const auto& t : r) {
        atoms.push_back(t[0]);
        atoms.push_back(t[1]);
    }
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    size_t n = atoms.size();
    auto idx = [&](Atom a) { return static_cast<size_t>(std::lower_bound(atoms.begin(), atoms.end(), a) - atoms.begin()); };
    std::vector<char> m(n * n, 0);
    for (const auto& t : r) m[idx(t[0]) * n + idx(t[1])] = 1;
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            if (m[i * n + k])
                for (size_t j = 0; j < n; ++j)
                    if (m[k * n + j]) m[i * n + j] = 1;
    TupleSet out(2);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (m[i * n + j]) out.push_sorted(Tuple{atoms[i], atoms[j]});
    return out;
}

TupleSet identity_over(const Instance& inst, const RelType& type) {
    std::vector<int> sigs;
    for (const auto& p : type.products)
        for (int s : p) sigs.push_back(s);
    TupleSet atoms(1);
    for (int s : sigs) atoms = set_union(atoms, inst.sig_sets[s]);
    TupleSet id(2);
    for (const auto& t : atoms) id.push_sorted(Tuple{t[0], t[0]});
    return id;
}

TupleSet combine(const Instance& inst, const Expr& e, const TupleSet* kids) {
    switch (e.kind) {
        case ExprKind::Union: return set_union(kids[0], kids[1]);
        case ExprKind::Diff: return set_difference(kids[0], kids[1]);
        case ExprKind::Intersect: return set_intersection(kids[0], kids[1]);
        case ExprKind::Join: return join(kids[0], kids[1]);
        case ExprKind::Product: return product(kids[0], kids[1]);
        case ExprKind::Closure: return closure(kids[0]);
        case ExprKind::ReflClosure: return set_union(closure(kids[0]), identity_over(inst, e.kids[0].type));
        case ExprKind::Transpose: return transpose(kids[0]);
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "cannot evaluate expression '" + to_text(e) + "'");
}

TupleSet leaf(const Instance& inst, const Expr& e, const Env& env) {
    switch (e.kind) {
        case ExprKind::SigRef: return inst.sig_sets.at(e.ref);
        case ExprKind::FieldRef: return inst.field_rels.at(e.ref);
        case ExprKind::VarRef: {
            if (e.ref < 0 || e.ref >= static_cast<int>(env.size()) || env[e.ref] == kNoAtom)
                throw Error(ErrorCode::UnboundVariable, "unbound variable '" + e.name + "'");
            TupleSet s(1);
            s.push_sorted(Tuple{env[e.ref]});
            return s;
        }
        default: throw Error(ErrorCode::UnboundVariable, "unresolved name '" + e.name + "'");
    }
}

TupleSet eval_e(const Instance& inst, const Expr& e, const Env& env) {
    if (e.is_ref()) return leaf(inst, e, env);
    TupleSet kids[2];
    for (size_t i = 0; i < e.kids.size(); ++i) kids[i] = eval_e(inst, e.kids[i], env);
    return combine(inst, e, kids);
}

bool mult_holds(Quantifier q, size_t n) {
    switch (q) {
        case Quantifier::No: return n == 0;
        case Quantifier::Some: return n >= 1;
        case Quantifier::Lone: return n <= 1;
        case Quantifier::One: return n == 1;
        case Quantifier::All: return true;
    }
    return false;
}

void bind(Env& env, int slot, Atom a) {
    if (static_cast<int>(env.size()) <= slot) env.resize(slot + 1, kNoAtom);
    env[slot] = a;
}

bool eval_f(const Instance& inst, const Formula& f, Env& env);

// Counts satisfying bindings over declarations [d, end); stops once `limit` is reached
// or, for `all`, at the first failure (count then holds failures).
size_t count_bindings(const Instance& inst, const Formula& f, size_t d, Env& env, size_t limit) {
    if (d == f.decls.size()) {
        bool body = eval_f(inst, f.kids[0], env);
        return f.quant == Quantifier::All ? !body : body;
    }
    const VarDecl& decl = f.decls[d];
    TupleSet dom = eval_e(inst, decl.domain, env);
    bind(env, decl.slot, kNoAtom);
    size_t n = 0;
    for (const auto& t : dom) {
        bind(env, decl.slot, t[0]);
        n += count_bindings(inst, f, d + 1, env, limit - n);
        if (n >= limit) break;
    }
    env[decl.slot] = kNoAtom;
    return n;
}

bool eval_f(const Instance& inst, const Formula& f, Env& env) {
    switch (f.kind) {
        case FormulaKind::True: return true;
        case FormulaKind::Mult: return mult_holds(f.quant, eval_e(inst, f.exprs[0], env).size());
        case FormulaKind::Subset: return eval_e(inst, f.exprs[0], env).subset_of(eval_e(inst, f.exprs[1], env));
        case FormulaKind::Equal: return eval_e(inst, f.exprs[0], env) == eval_e(inst, f.exprs[1], env);
        case FormulaKind::Not: return !eval_f(inst, f.kids[0], env);
        case FormulaKind::And: return eval_f(inst, f.kids[0], env) && eval_f(inst, f.kids[1], env);
        case FormulaKind::Or: return eval_f(inst, f.kids[0], env) || eval_f(inst, f.kids[1], env);
        case FormulaKind::Implies: return !eval_f(inst, f.kids[0], env) || eval_f(inst, f.kids[1], env);
        case FormulaKind::Iff: return eval_f(inst, f.kids[0], env) == eval_f(inst, f.kids[1], env);
        case FormulaKind::Quant: {
            switch (f.quant) {
                case Quantifier::All: return count_bindings(inst, f, 0, env, 1) == 0;
                case Quantifier::Some: return count_bindings(inst, f, 0, env, 1) == 1;
                case Quantifier::No: return count_bindings(inst, f, 0, env, 1) == 0;
                case Quantifier::Lone: return count_bindings(inst, f, 0, env, 2) <= 1;
                case Quantifier::One: return count_bindings(inst, f, 0, env, 2) == 1;
            }
        }
    }
    return false;
}

class Tracer {
public:
    explicit Tracer(const Instance& inst) : inst_(inst) {}

    TraceNode formula(const Formula& f) {
        TraceNode n;
        n.kind = TraceNode::Kind::Formula;
        n.span = f.span;
        n.formula = &f;
        n.bindings = bindings_;
        switch (f.kind) {
            case FormulaKind::True:
                n.truth = true;
                break;
            case FormulaKind::Mult:
                n.children.push_back(expr(f.exprs[0]));
                n.truth = mult_holds(f.quant, n.children[0].value.size());
                break;
            case FormulaKind::Subset:
            case FormulaKind::Equal: {
                n.children.push_back(expr(f.exprs[0]));
                n.children.push_back(expr(f.exprs[1]));
                const TupleSet& a = n.children[0].value;
                const TupleSet& b = n.children[1].value;
                n.truth = f.kind == FormulaKind::Subset ? a.subset_of(b) : a == b;
                break;
            }
            case FormulaKind::Not:
                n.children.push_back(formula(f.kids[0]));
                n.truth = !n.children[0].truth;
                break;
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies:
            case FormulaKind::Iff: {
                n.children.push_back(formula(f.kids[0]));
                n.children.push_back(formula(f.kids[1]));
                bool a = n.children[0].truth;
                bool b = n.children[1].truth;
                n.truth = f.kind == FormulaKind::And       ? a && b
                          : f.kind == FormulaKind::Or      ? a || b
                          : f.kind == FormulaKind::Implies ? !a || b
                                                           : a == b;
                break;
            }
            case FormulaKind::Quant: {
                size_t sat = 0;
                quant(f, 0, n, sat);
                size_t total = n.children.size();
                switch (f.quant) {
                    case Quantifier::All: n.truth = sat == total; break;
                    case Quantifier::Some: n.truth = sat >= 1; break;
                    case Quantifier::No: n.truth = sat == 0; break;
                    case Quantifier::Lone: n.truth = sat <= 1; break;
                    case Quantifier::One: n.truth = sat == 1; break;
                }
                break;
            }
        }
        return n;
    }

    TraceNode expr(const Expr& e) {
        TraceNode n;
        n.kind = TraceNode::Kind::Expr;
        n.span = e.span;
        n.expr = &e;
        n.bindings = bindings_;
        if (e.is_ref()) {
            n.value = leaf(inst_, e, env_);
            return n;
        }
        TupleSet kids[2];
        for (size_t i = 0; i < e.kids.size(); ++i) {
            n.children.push_back(expr(e.kids[i]));
            kids[i] = n.children.back().value;
        }
        n.value = combine(inst_, e, kids);
        return n;
    }

private:
    void quant(const Formula& f, size_t d, TraceNode& node, size_t& sat) {
        if (d == f.decls.size()) {
            node.children.push_back(formula(f.kids[0]));
            if (node.children.back().truth) ++sat;
            return;
        }
        const VarDecl& decl = f.decls[d];
        node.domains.push_back(expr(decl.domain));
        TupleSet dom = node.domains.back().value;
        for (const auto& t : dom) {
            bind(env_, decl.slot, t[0]);
            bindings_.emplace_back(decl.name, t[0]);
            quant(f, d + 1, node, sat);
            bindings_.pop_back();
        }
        if (decl.slot < static_cast<int>(env_.size())) env_[decl.slot] = kNoAtom;
    }

    const Instance& inst_;
    Env env_;
    Bindings bindings_;
};

}  // namespace

TupleSet eval_expr(const Instance& inst, const Expr& expr, const Env& env) { return eval_e(inst, expr, env); }

bool eval_formula(const Instance& inst, const Formula& formula, const Env& env) {
    Env local = env;
    return eval_f(inst, formula, local);
}

TraceNode eval_trace(const Instance& inst, const Formula& formula) {
    Tracer t(inst);
    return t.formula(formula);
}

std::optional<bool> CheckResult::find(const std::string& id) const {
    for (const auto& [k, v] : per_formula)
        if (k == id) return v;
    return std::nullopt;
}

AtomScope atom_scope(const Instance& inst) {
    AtomScope scope;
    const Schema& s = *inst.schema;
    for (size_t t = 0; t < s.tops.size(); ++t)
        for (Atom a : inst.universe.atoms(static_cast<int>(t))) {
            scope.vars.push_back({inst.universe.atom_name(a), RelType{1, {{s.tops[t]}}}});
            scope.env.push_back(a);
        }
    return scope;
}

Instance align(const TypedModel& model, const Instance& inst) {
    if (inst.schema == model.schema) {
        validate_shape(inst);
        return inst;
    }
    if (!inst.schema) throw Error(ErrorCode::StructuralMismatch, "instance has no schema");
    return rebind(inst, model.schema);
}

namespace {

CheckResult check_aligned(const TypedModel& model, const Instance& inst, const Formula* goal,
                          const std::string& goal_id) {
    CheckResult r;
    r.overall = true;
    for (const auto& b : model.model.facts) {
        bool ok = eval_formula(inst, conjunction(b.body));
        r.per_formula.emplace_back(b.name, ok);
        r.overall = r.overall && ok;
    }
    bool implicit = implicit_violations(inst).empty();
    r.per_formula.emplace_back(kImplicitId, implicit);
    r.overall = r.overall && implicit;
    if (goal) {
        bool ok = eval_formula(inst, *goal);
        r.per_formula.emplace_back(goal_id, ok);
        r.overall = r.overall && ok;
    }
    return r;
}

}  // namespace

CheckResult check_instance(const TypedModel& model, const Instance& inst, const std::optional<std::string>& pred) {
    Instance aligned = align(model, inst);
    if (!pred) return check_aligned(model, aligned, nullptr, "");
    const Block* b = model.find_pred(*pred);
    if (!b) throw Error(ErrorCode::InvalidArgument, "unknown predicate '" + *pred + "'");
    Formula goal = conjunction(b->body);
    return check_aligned(model, aligned, &goal, *pred);
}

CheckResult check_instance(const TypedModel& model, const Instance& inst, const Formula& goal,
                           const std::string& goal_id) {
    Instance aligned = align(model, inst);
    return check_aligned(model, aligned, &goal, goal_id);
}

bool satisfies(const TypedModel& model, const Instance& inst, const Formula& goal) {
    Instance aligned = align(model, inst);
    if (!implicit_violations(aligned).empty()) return false;
    for (const auto& b : model.model.facts)
        for (const auto& f : b.body)
            if (!eval_formula(aligned, f)) return false;
    return eval_formula(aligned, goal);
}

}  // namespace livemodel
