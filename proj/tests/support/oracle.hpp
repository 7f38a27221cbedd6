#pragma once

// Independent reference semantics for tests: naive set-of-vectors relations,
// fixed-point closure, name-keyed environments, and exhaustive candidate generation.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "livemodel/eval.hpp"
#include "livemodel/instance_io.hpp"

namespace oracle {

using Rel = std::set<std::vector<uint32_t>>;
using NameEnv = std::map<std::string, uint32_t>;

inline Rel rel_of(const livemodel::TupleSet& s) {
    Rel r;
    for (const auto& t : s) r.insert(std::vector<uint32_t>(t.atoms.begin(), t.atoms.begin() + t.arity));
    return r;
}

inline Rel join(const Rel& a, const Rel& b) {
    Rel out;
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.back() == y.front()) {
                std::vector<uint32_t> t(x.begin(), x.end() - 1);
                t.insert(t.end(), y.begin() + 1, y.end());
                out.insert(t);
            }
    return out;
}

inline Rel closure(const Rel& r) {
    Rel c = r;
    while (true) {
        Rel next = c;
        for (const auto& t : join(c, c)) next.insert(t);
        if (next == c) return c;
        c = next;
    }
}

inline Rel eval(const livemodel::Instance& inst, const livemodel::Expr& e, const NameEnv& env) {
    using livemodel::ExprKind;
    switch (e.kind) {
        case ExprKind::SigRef: return rel_of(inst.sig(e.name));
        case ExprKind::FieldRef: return rel_of(inst.field(e.name));
        case ExprKind::VarRef: return Rel{{env.at(e.name)}};
        case ExprKind::Union: {
            Rel a = eval(inst, e.kids[0], env), b = eval(inst, e.kids[1], env);
            a.insert(b.begin(), b.end());
            return a;
        }
        case ExprKind::Diff: {
            Rel a = eval(inst, e.kids[0], env), b = eval(inst, e.kids[1], env), out;
            for (const auto& t : a)
                if (!b.count(t)) out.insert(t);
            return out;
        }
        case ExprKind::Intersect: {
            Rel a = eval(inst, e.kids[0], env), b = eval(inst, e.kids[1], env), out;
            for (const auto& t : a)
                if (b.count(t)) out.insert(t);
            return out;
        }
        case ExprKind::Join: return join(eval(inst, e.kids[0], env), eval(inst, e.kids[1], env));
        case ExprKind::Product: {
            Rel a = eval(inst, e.kids[0], env), b = eval(inst, e.kids[1], env), out;
            for (const auto& x : a)
                for (const auto& y : b) {
                    auto t = x;
                    t.insert(t.end(), y.begin(), y.end());
                    out.insert(t);
                }
            return out;
        }
        case ExprKind::Closure: return closure(eval(inst, e.kids[0], env));
        case ExprKind::ReflClosure: {
            Rel c = closure(eval(inst, e.kids[0], env));
            for (const auto& p : e.kids[0].type.products)
                for (int sig : p)
                    for (const auto& t : inst.sig_sets[sig]) c.insert({t[0], t[0]});
            return c;
        }
        case ExprKind::Transpose: {
            Rel out;
            for (const auto& t : eval(inst, e.kids[0], env)) out.insert({t[1], t[0]});
            return out;
        }
        default: throw std::runtime_error("oracle: unresolved expression");
    }
}

inline bool holds(const livemodel::Instance& inst, const livemodel::Formula& f, NameEnv& env);

inline void bindings(const livemodel::Instance& inst, const livemodel::Formula& f, size_t d, NameEnv& env,
                     const std::function<void()>& body) {
    if (d == f.decls.size()) {
        body();
        return;
    }
    for (const auto& t : eval(inst, f.decls[d].domain, env)) {
        NameEnv saved = env;
        env[f.decls[d].name] = t[0];
        bindings(inst, f, d + 1, env, body);
        env = saved;
    }
}

inline bool holds(const livemodel::Instance& inst, const livemodel::Formula& f, NameEnv& env) {
    using livemodel::FormulaKind;
    using livemodel::Quantifier;
    auto count_ok = [](Quantifier q, size_t n, size_t total) {
        switch (q) {
            case Quantifier::All: return n == total;
            case Quantifier::Some: return n >= 1;
            case Quantifier::No: return n == 0;
            case Quantifier::Lone: return n <= 1;
            case Quantifier::One: return n == 1;
        }
        return false;
    };
    switch (f.kind) {
        case FormulaKind::True: return true;
        case FormulaKind::Mult: {
            size_t n = eval(inst, f.exprs[0], env).size();
            return count_ok(f.quant, n, n);
        }
        case FormulaKind::Subset: {
            Rel a = eval(inst, f.exprs[0], env), b = eval(inst, f.exprs[1], env);
            for (const auto& t : a)
                if (!b.count(t)) return false;
            return true;
        }
        case FormulaKind::Equal: return eval(inst, f.exprs[0], env) == eval(inst, f.exprs[1], env);
        case FormulaKind::Not: return !holds(inst, f.kids[0], env);
        case FormulaKind::And: {
            bool a = holds(inst, f.kids[0], env), b = holds(inst, f.kids[1], env);
            return a && b;
        }
        case FormulaKind::Or: {
            bool a = holds(inst, f.kids[0], env), b = holds(inst, f.kids[1], env);
            return a || b;
        }
        case FormulaKind::Implies: {
            bool a = holds(inst, f.kids[0], env), b = holds(inst, f.kids[1], env);
            return !a || b;
        }
        case FormulaKind::Iff: return holds(inst, f.kids[0], env) == holds(inst, f.kids[1], env);
        case FormulaKind::Quant: {
            size_t n = 0, total = 0;
            bindings(inst, f, 0, env, [&] {
                ++total;
                if (holds(inst, f.kids[0], env)) ++n;
            });
            return count_ok(f.quant, n, total);
        }
    }
    return false;
}

inline bool holds(const livemodel::Instance& inst, const livemodel::Formula& f) {
    NameEnv env;
    return holds(inst, f, env);
}

/// Structural well-formedness written directly from the instance invariants.
inline bool sigs_well_formed(const livemodel::Instance& inst) {
    const auto& s = *inst.schema;
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        const auto& sig = s.sigs[i];
        Rel set = rel_of(inst.sig_sets[i]);
        if (sig.parent >= 0) {
            Rel parent = rel_of(inst.sig_sets[sig.parent]);
            for (const auto& t : set)
                if (!parent.count(t)) return false;
        }
        Rel kids;
        for (int k : sig.extends_children)
            for (const auto& t : rel_of(inst.sig_sets[k]))
                if (!kids.insert(t).second) return false;
        if (sig.is_abstract && kids != set) return false;
        if (sig.mult == livemodel::SigMult::One && set.size() != 1) return false;
        if (sig.mult == livemodel::SigMult::Lone && set.size() > 1) return false;
        if (sig.mult == livemodel::SigMult::Some && set.empty()) return false;
    }
    return true;
}

inline bool field_well_formed(const livemodel::Instance& inst, size_t i) {
    const auto& s = *inst.schema;
    const auto& f = s.fields[i];
    Rel r = rel_of(inst.field_rels[i]);
    for (const auto& t : r)
        for (size_t c = 0; c < t.size(); ++c)
            if (!rel_of(inst.sig_sets[f.columns[c]]).count({t[c]})) return false;
    if (f.ternary) return true;
    for (const auto& o : rel_of(inst.sig_sets[f.owner])) {
        size_t n = 0;
        for (const auto& t : r)
            if (t[0] == o[0]) ++n;
        if (f.mult == livemodel::FieldMult::Lone && n > 1) return false;
        if (f.mult == livemodel::FieldMult::One && n != 1) return false;
        if (f.mult == livemodel::FieldMult::Some && n < 1) return false;
    }
    return true;
}

inline bool well_formed(const livemodel::Instance& inst) {
    if (!sigs_well_formed(inst)) return false;
    for (size_t i = 0; i < inst.schema->fields.size(); ++i)
        if (!field_well_formed(inst, i)) return false;
    return true;
}

inline bool satisfies(const livemodel::TypedModel& m, const livemodel::Instance& inst, const livemodel::Formula& goal) {
    if (!well_formed(inst)) return false;
    for (const auto& b : m.model.facts)
        for (const auto& f : b.body)
            if (!holds(inst, f)) return false;
    return holds(inst, goal);
}

/// Every instance shape over a universe of the given top-level counts: each non-top sig
/// over every subset of its top's atoms, each field over every subset of the full column
/// product. With `prune`, shapes already ill-formed on their sigs or a finished field are
/// skipped; otherwise `fn` sees every candidate.
inline void for_each_candidate(std::shared_ptr<const livemodel::Schema> schema, const std::vector<int>& counts,
                               const std::function<void(const livemodel::Instance&)>& fn, bool prune = true) {
    using namespace livemodel;
    const Schema& s = *schema;
    Instance base = Instance::empty(schema, Universe::standard(s, counts));
    struct Slot {
        bool is_sig;
        int id;
        std::vector<Tuple> universe;
    };
    std::vector<Slot> slots;
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        if (s.sigs[i].kind == SigKind::Top) continue;
        std::vector<Tuple> u;
        for (Atom a : base.universe.atoms(s.sigs[i].top_ordinal)) u.push_back(Tuple{a});
        slots.push_back({true, static_cast<int>(i), u});
    }
    for (size_t i = 0; i < s.fields.size(); ++i) {
        std::vector<std::vector<Atom>> cols;
        for (int c : s.fields[i].columns) cols.push_back(base.universe.atoms(s.sigs[c].top_ordinal));
        std::vector<Tuple> u;
        std::function<void(size_t, Tuple)> rec = [&](size_t c, Tuple t) {
            if (c == cols.size()) {
                u.push_back(t);
                return;
            }
            for (Atom a : cols[c]) {
                Tuple n = t;
                n.atoms[n.arity++] = a;
                rec(c + 1, n);
            }
        };
        rec(0, Tuple{});
        slots.push_back({false, static_cast<int>(i), u});
    }
    size_t sig_slots = 0;
    for (const auto& sl : slots) sig_slots += sl.is_sig;
    std::function<void(size_t, Instance&)> go = [&](size_t k, Instance& cur) {
        if (prune && k == sig_slots && !sigs_well_formed(cur)) return;
        if (prune && k > sig_slots && !field_well_formed(cur, slots[k - 1].id)) return;
        if (k == slots.size()) {
            fn(cur);
            return;
        }
        const Slot& sl = slots[k];
        uint64_t n = uint64_t{1} << sl.universe.size();
        for (uint64_t mask = 0; mask < n; ++mask) {
            std::vector<Tuple> chosen;
            for (size_t b = 0; b < sl.universe.size(); ++b)
                if (mask >> b & 1) chosen.push_back(sl.universe[b]);
            TupleSet set = TupleSet::from(sl.is_sig ? 1 : s.fields[sl.id].arity(), chosen);
            if (sl.is_sig) cur.sig_sets[sl.id] = set;
            else cur.field_rels[sl.id] = set;
            go(k + 1, cur);
        }
    };
    go(0, base);
}

/// All top-level count vectors within per-top upper bounds (a `one` sig is fixed at 1).
inline std::vector<std::vector<int>> count_vectors(const livemodel::Schema& s, const std::vector<int>& bounds) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(s.tops.size(), 0);
    std::function<void(size_t)> rec = [&](size_t t) {
        if (t == s.tops.size()) {
            out.push_back(cur);
            return;
        }
        const auto& sig = s.sigs[s.tops[t]];
        int lo = 0, hi = bounds[t];
        if (sig.mult == livemodel::SigMult::One) lo = hi = 1;
        for (int n = lo; n <= hi; ++n) {
            cur[t] = n;
            rec(t + 1);
        }
    };
    rec(0);
    return out;
}

/// Brute-force satisfying set, as canonical text renderings of each instance.
inline std::set<std::string> brute_force(const livemodel::TypedModel& m, const livemodel::Formula& goal,
                                         const std::vector<int>& bounds) {
    std::set<std::string> out;
    for (const auto& counts : count_vectors(*m.schema, bounds))
        for_each_candidate(m.schema, counts, [&](const livemodel::Instance& inst) {
            if (oracle::satisfies(m, inst, goal)) out.insert(livemodel::instance_to_text(inst));
        });
    return out;
}

}  // namespace oracle
