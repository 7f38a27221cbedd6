#pragma once

// Reference computations for distance, closest instances and formula breakdowns.

#include <algorithm>
#include <optional>
#include <random>

#include "livemodel/finder.hpp"
#include "livemodel/proximity.hpp"
#include "oracle.hpp"

namespace oracle {

/// Tuples present in exactly one of the two instances, counted per sig and field.
inline int distance(const livemodel::Instance& a, const livemodel::Instance& b) {
    int d = 0;
    auto sym = [&](const Rel& x, const Rel& y) {
        for (const auto& t : x) d += !y.count(t);
        for (const auto& t : y) d += !x.count(t);
    };
    for (size_t i = 0; i < a.sig_sets.size(); ++i) sym(rel_of(a.sig_sets[i]), rel_of(b.sig_sets[i]));
    for (size_t i = 0; i < a.field_rels.size(); ++i) sym(rel_of(a.field_rels[i]), rel_of(b.field_rels[i]));
    return d;
}

inline std::string row_key(const livemodel::BreakdownRow& r) {
    if (r.id.find('/') == std::string::npos) return r.id;
    std::string k = r.id;
    for (const auto& [n, atom] : r.context) k += "|" + n + "=" + std::to_string(atom);
    return k;
}

/// Every well-formed candidate over every count vector within uniform bounds.
inline std::vector<livemodel::Instance> pool(const livemodel::TypedModel& m, int bound) {
    std::vector<livemodel::Instance> out;
    std::vector<int> bounds(m.schema->tops.size(), bound);
    for (const auto& counts : count_vectors(*m.schema, bounds))
        for_each_candidate(m.schema, counts, [&](const livemodel::Instance& inst) { out.push_back(inst); });
    return out;
}

/// The minimal-distance instance among `sat`, earliest in canonical order among equals.
inline std::optional<std::pair<livemodel::Instance, int>> nearest(const std::vector<livemodel::Instance>& sat,
                                                                  const livemodel::Instance& target) {
    std::optional<std::pair<livemodel::Instance, int>> best;
    for (const auto& s : sat) {
        int d = distance(s, target);
        if (!best || d < best->second ||
            (d == best->second && livemodel::canonical_key(s) < livemodel::canonical_key(best->first)))
            best = std::make_pair(s, d);
    }
    return best;
}

/// Row key of a quantified subformula: "<named id>/<pre-order index>" plus its context.
inline std::string context_key(const std::string& id, int index, const livemodel::Bindings& ctx) {
    std::string k = id + "/" + std::to_string(index);
    for (const auto& [n, atom] : ctx) k += "|" + n + "=" + std::to_string(atom);
    return k;
}

inline void quant_indices(const livemodel::Formula& f, std::map<const livemodel::Formula*, int>& out) {
    if (f.kind == livemodel::FormulaKind::Quant) {
        int k = static_cast<int>(out.size());
        out[&f] = k;
    }
    for (const auto& kid : f.kids) quant_indices(kid, out);
}

/// Every (quantified subformula, enclosing binding) reached when evaluating f over inst.
inline void quant_contexts(const livemodel::Instance& inst, const livemodel::Formula& f, NameEnv& env,
                           livemodel::Bindings& ctx,
                           std::vector<std::pair<const livemodel::Formula*, livemodel::Bindings>>& out) {
    if (f.kind == livemodel::FormulaKind::Quant) {
        out.emplace_back(&f, ctx);
        bindings(inst, f, 0, env, [&] {
            size_t before = ctx.size();
            for (const auto& d : f.decls) ctx.emplace_back(d.name, env[d.name]);
            quant_contexts(inst, f.kids[0], env, ctx, out);
            ctx.resize(before);
        });
        return;
    }
    for (const auto& k : f.kids) quant_contexts(inst, k, env, ctx, out);
}

inline bool atoms_exist(const livemodel::Instance& inst, const livemodel::Bindings& ctx) {
    for (const auto& [n, a] : ctx)
        if (livemodel::atom_index(a) >= inst.universe.count(livemodel::atom_top(a))) return false;
    return true;
}

/// Expected breakdown keys: named formulas whose truth differs, then non-root quantified
/// subformulas whose truth under an enclosing binding differs (absent atoms count as a difference).
inline std::set<std::string> expected_breakdown(const livemodel::TypedModel& m, const livemodel::Formula& goal,
                                                const std::string& goal_id, const livemodel::Instance& a,
                                                const livemodel::Instance& b,
                                                std::vector<std::pair<std::string, livemodel::Formula>>& named) {
    named.clear();
    for (const auto& blk : m.model.facts) named.emplace_back(blk.name, livemodel::conjunction(blk.body));
    named.emplace_back(goal_id, goal);
    std::set<std::string> out;
    for (const auto& [id, f] : named) {
        if (holds(a, f) != holds(b, f)) out.insert(id);
        std::map<const livemodel::Formula*, int> index;
        quant_indices(f, index);
        std::vector<std::pair<const livemodel::Formula*, livemodel::Bindings>> sites;
        for (const auto* inst : {&a, &b}) {
            NameEnv env;
            livemodel::Bindings ctx;
            quant_contexts(*inst, f, env, ctx, sites);
        }
        for (const auto& [site, ctx] : sites) {
            if (site == &f) continue;
            auto value = [&](const livemodel::Instance& inst) -> std::optional<bool> {
                if (!atoms_exist(inst, ctx)) return std::nullopt;
                NameEnv env;
                for (const auto& [n, atom] : ctx) env[n] = atom;
                return holds(inst, *site, env);
            };
            if (value(a) != value(b)) out.insert(context_key(id, index[site], ctx));
        }
    }
    return out;
}

}  // namespace oracle
