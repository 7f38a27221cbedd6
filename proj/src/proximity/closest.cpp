#include <bit>
#include <climits>
#include <cstdlib>

#include "../finder/space.hpp"
#include "livemodel/diagnostic.hpp"
#include "livemodel/proximity.hpp"

namespace livemodel {

int instance_distance(const Instance& a, const Instance& b) {
    Instance bb = a.schema == b.schema ? b : rebind(b, a.schema);
    size_t d = 0;
    for (size_t i = 0; i < a.sig_sets.size(); ++i) d += symmetric_difference_size(a.sig_sets[i], bb.sig_sets[i]);
    for (size_t i = 0; i < a.field_rels.size(); ++i)
        d += symmetric_difference_size(a.field_rels[i], bb.field_rels[i]);
    return static_cast<int>(d);
}

const char* to_string(Polarity p) { return p == Polarity::Valid ? "valid" : "invalid"; }

std::optional<Polarity> polarity_from_string(std::string_view s) {
    if (s == "valid") return Polarity::Valid;
    if (s == "invalid") return Polarity::Invalid;
    return std::nullopt;
}

namespace {

bool inside(const Tuple& t, const std::vector<int>& counts) {
    for (int c = 0; c < t.arity; ++c)
        if (atom_index(t[c]) >= counts[atom_top(t[c])]) return false;
    return true;
}

// Distance contributed by everything a space over `counts` cannot express: top-level
// membership differences and target tuples that mention atoms beyond the counts.
int outside_cost(const Instance& t, const std::vector<int>& counts) {
    const Schema& s = *t.schema;
    int cost = 0;
    for (size_t top = 0; top < counts.size(); ++top) cost += std::abs(counts[top] - t.universe.count(top));
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        if (s.sigs[i].kind == SigKind::Top) continue;
        for (const auto& tu : t.sig_sets[i]) cost += !inside(tu, counts);
    }
    for (const auto& rel : t.field_rels)
        for (const auto& tu : rel) cost += !inside(tu, counts);
    return cost;
}

}  // namespace

std::optional<ClosestResult> closest(const TypedModel& model, const Formula& goal, const Instance& target,
                                     Polarity polarity, const Scope& scope, const SearchControl& control) {
    Instance t = align(model, target);
    validate_shape(t);
    if (!within_scope(t, scope)) throw Error(ErrorCode::InvalidArgument, "target lies outside the scope");
    Formula hard_goal = polarity == Polarity::Valid ? goal : negation(goal);
    Formula hard = conjoin(model.facts(), hard_goal);

    auto ranges = scope.ranges(*model.schema);
    detail::check_budget(model.schema, ranges, control.budget_log2);
    cancellable_sleep(control.cancel, control.artificial_delay);

    if (satisfies(model, t, hard_goal)) return ClosestResult{t, 0, 1};

    struct Frame {
        std::vector<uint64_t> choices;
        int idx = -1;
        int cost = 0;  // distance through this slot
    };
    std::optional<Instance> best;
    int best_cost = INT_MAX;
    uint64_t candidates = 0;
    uint64_t steps = 0;

    std::vector<int> counts;
    for (bool more = detail::first_vector(counts, ranges); more; more = detail::next_vector(counts, ranges)) {
        control.cancel.check();
        int outside = outside_cost(t, counts);
        if (outside >= best_cost) continue;
        detail::Space space(model.schema, counts);
        Instance cur = space.blank();
        const size_t n = space.slots().size();
        auto leaf = [&](int cost) {
            ++candidates;
            if (cost < best_cost && eval_formula(cur, hard)) {
                best_cost = cost;
                best = cur;
            }
        };
        if (n == 0) {
            leaf(outside);
            continue;
        }
        std::vector<uint64_t> seg(n);
        for (size_t k = 0; k < n; ++k) seg[k] = space.segment(k, t);
        std::vector<Frame> frames(n);
        size_t k = 0;
        bool load = true;
        while (true) {
            if (++steps % control.poll_interval == 0) control.cancel.check();
            Frame& f = frames[k];
            if (load) {
                space.choices(k, cur, f.choices);
                f.idx = -1;
                load = false;
            }
            int base = k == 0 ? outside : frames[k - 1].cost;
            bool ok = false;
            while (++f.idx < static_cast<int>(f.choices.size())) {
                uint64_t c = f.choices[f.idx];
                int cost = base + std::popcount(c ^ seg[k]);
                if (cost >= best_cost) continue;
                space.apply(k, c, cur);
                if (!space.valid_after(k, cur)) continue;
                f.cost = cost;
                ok = true;
                break;
            }
            if (ok) {
                if (k + 1 == n) leaf(f.cost);
                else {
                    ++k;
                    load = true;
                }
                continue;
            }
            if (k == 0) break;
            --k;
        }
    }
    if (!best) return std::nullopt;
    return ClosestResult{std::move(*best), best_cost, candidates};
}

}  // namespace livemodel
