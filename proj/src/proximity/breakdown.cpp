#include <map>

#include "livemodel/diagnostic.hpp"
#include "livemodel/proximity.hpp"

namespace livemodel {

namespace {

struct QuantSite {
    const Formula* formula = nullptr;
    int index = 0;
    std::vector<int> outer_slots;  // slots of enclosing declarations, outermost first
};

void collect_sites(const Formula& f, std::vector<int>& slots, std::vector<QuantSite>& out) {
    if (f.kind == FormulaKind::Quant) {
        out.push_back({&f, static_cast<int>(out.size()), slots});
        for (const auto& d : f.decls) slots.push_back(d.slot);
        for (const auto& k : f.kids) collect_sites(k, slots, out);
        slots.resize(slots.size() - f.decls.size());
        return;
    }
    for (const auto& k : f.kids) collect_sites(k, slots, out);
}

// Per quantifier occurrence: the enclosing bindings and each enumerated binding's truth.
struct Occurrence {
    Bindings context;
    std::vector<std::pair<Bindings, bool>> bindings;
};

void collect_occurrences(const TraceNode& n, std::map<const Formula*, std::vector<Occurrence>>& out) {
    if (n.kind != TraceNode::Kind::Formula) return;
    if (n.formula && n.formula->kind == FormulaKind::Quant) {
        Occurrence occ;
        occ.context = n.bindings;
        for (const auto& c : n.children)
            occ.bindings.emplace_back(Bindings(c.bindings.begin() + n.bindings.size(), c.bindings.end()), c.truth);
        out[n.formula].push_back(std::move(occ));
    }
    for (const auto& c : n.children) collect_occurrences(c, out);
}

const Occurrence* find_occurrence(const std::vector<Occurrence>& xs, const Bindings& context) {
    for (const auto& o : xs)
        if (o.context == context) return &o;
    return nullptr;
}

std::optional<bool> eval_in_context(const Instance& inst, const QuantSite& site, const Bindings& context) {
    Env env;
    for (size_t i = 0; i < context.size(); ++i) {
        Atom a = context[i].second;
        if (atom_top(a) >= static_cast<int>(inst.universe.names.size()) ||
            atom_index(a) >= inst.universe.count(atom_top(a)))
            return std::nullopt;
        int slot = site.outer_slots[i];
        if (static_cast<int>(env.size()) <= slot) env.resize(slot + 1, kNoAtom);
        env[slot] = a;
    }
    return eval_formula(inst, *site.formula, env);
}

std::vector<BindingRow> merge_bindings(const Occurrence* a, const Occurrence* b) {
    std::vector<BindingRow> rows;
    auto find = [&](const Bindings& key) -> BindingRow* {
        for (auto& r : rows)
            if (r.bindings == key) return &r;
        return nullptr;
    };
    if (a)
        for (const auto& [bind, truth] : a->bindings) rows.push_back({bind, truth, std::nullopt});
    if (b)
        for (const auto& [bind, truth] : b->bindings) {
            if (BindingRow* r = find(bind)) r->value_b = truth;
            else rows.push_back({bind, std::nullopt, truth});
        }
    return rows;
}

}  // namespace

BreakdownReport breakdown(const TypedModel& model, const Formula& goal, const Instance& a_in, const Instance& b_in,
                          const std::string& goal_id) {
    Instance a = align(model, a_in);
    Instance b = align(model, b_in);
    validate_shape(a);
    validate_shape(b);

    std::vector<std::pair<std::string, Formula>> named;
    std::vector<Span> spans;
    for (const auto& block : model.model.facts) {
        named.emplace_back(block.name, conjunction(block.body));
        spans.push_back(block.span);
    }
    named.emplace_back(goal_id, goal);
    spans.push_back(goal.span);

    BreakdownReport report;
    for (size_t i = 0; i < named.size(); ++i) {
        const auto& [id, f] = named[i];
        std::vector<QuantSite> sites;
        std::vector<int> slots;
        collect_sites(f, slots, sites);

        TraceNode ta = eval_trace(a, f);
        TraceNode tb = eval_trace(b, f);
        std::map<const Formula*, std::vector<Occurrence>> occ_a, occ_b;
        collect_occurrences(ta, occ_a);
        collect_occurrences(tb, occ_b);

        BreakdownRow top;
        top.id = id;
        top.span = spans[i];
        top.formula = to_text(f);
        top.value_a = ta.truth;
        top.value_b = tb.truth;
        std::vector<BreakdownRow> sub;
        for (const auto& site : sites) {
            const auto& xa = occ_a[site.formula];
            const auto& xb = occ_b[site.formula];
            std::vector<Bindings> contexts;
            for (const auto& o : xa) contexts.push_back(o.context);
            for (const auto& o : xb)
                if (!find_occurrence(xa, o.context)) contexts.push_back(o.context);
            for (const auto& ctx : contexts) {
                const Occurrence* oa = find_occurrence(xa, ctx);
                const Occurrence* ob = find_occurrence(xb, ctx);
                if (site.formula == &f) {
                    top.per_binding = merge_bindings(oa, ob);
                    continue;
                }
                BreakdownRow row;
                row.id = id + "/" + std::to_string(site.index);
                row.span = site.formula->span;
                row.formula = to_text(*site.formula);
                row.context = ctx;
                row.value_a = eval_in_context(a, site, ctx);
                row.value_b = eval_in_context(b, site, ctx);
                if (row.value_a == row.value_b) continue;
                row.per_binding = merge_bindings(oa, ob);
                sub.push_back(std::move(row));
            }
        }
        if (top.value_a != top.value_b) report.rows.push_back(std::move(top));
        for (auto& r : sub) report.rows.push_back(std::move(r));
    }
    return report;
}

}  // namespace livemodel
