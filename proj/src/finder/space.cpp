#include "space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "livemodel/diagnostic.hpp"

namespace livemodel::detail {

namespace {

bool mult_ok(FieldMult m, int n) {
    switch (m) {
        case FieldMult::Set: return true;
        case FieldMult::Lone: return n <= 1;
        case FieldMult::One: return n == 1;
        case FieldMult::Some: return n >= 1;
    }
    return true;
}

bool sig_mult_ok(SigMult m, int n) {
    switch (m) {
        case SigMult::Default: return true;
        case SigMult::Lone: return n <= 1;
        case SigMult::One: return n == 1;
        case SigMult::Some: return n >= 1;
    }
    return true;
}

}  // namespace

Space::Space(std::shared_ptr<const Schema> schema, std::vector<int> counts)
    : schema_(std::move(schema)), counts_(std::move(counts)) {
    const Schema& s = *schema_;
    for (int c : counts_)
        if (c > 62) throw Error(ErrorCode::ScopeTooLarge, "scope of more than 62 atoms per signature");
    for (int id : s.subsig_order()) {
        Slot slot;
        slot.kind = SlotKind::Sig;
        slot.id = id;
        slot.top = s.sigs[id].top_ordinal;
        slot.width = counts_[slot.top];
        slots_.push_back(slot);
    }
    // The coverage check of an abstract sig runs once its last extends child is set.
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        if (!s.sigs[i].is_abstract || s.sigs[i].extends_children.empty()) continue;
        int last = -1;
        for (size_t k = 0; k < slots_.size(); ++k)
            for (int child : s.sigs[i].extends_children)
                if (slots_[k].id == child) last = static_cast<int>(k);
        if (last >= 0) slots_[last].abstract_parent = static_cast<int>(i);
    }
    for (size_t f = 0; f < s.fields.size(); ++f) {
        const FieldInfo& fi = s.fields[f];
        int owner_top = s.sigs[fi.owner].top_ordinal;
        int target_top = s.sigs[fi.columns.back()].top_ordinal;
        for (int o = 0; o < counts_[owner_top]; ++o) {
            if (!fi.ternary) {
                Slot slot{SlotKind::Binary, static_cast<int>(f), o, -1, counts_[target_top], target_top, -1};
                slots_.push_back(slot);
                continue;
            }
            int mid_top = s.sigs[fi.columns[1]].top_ordinal;
            for (int m = 0; m < counts_[mid_top]; ++m) {
                Slot slot{SlotKind::Ternary, static_cast<int>(f), o, m, counts_[target_top], target_top, -1};
                slots_.push_back(slot);
            }
        }
    }
}

Instance Space::blank() const { return Instance::empty(schema_, Universe::standard(*schema_, counts_)); }

uint64_t Space::mask_of(const TupleSet& unary, int top) const {
    uint64_t m = 0;
    int width = counts_[top];
    for (const auto& t : unary) {
        Atom a = t[0];
        if (atom_top(a) == top && atom_index(a) < width) m |= bit(atom_index(a), width);
    }
    return m;
}

uint64_t Space::row_mask(const TupleSet& rel, const Tuple& prefix, int prefix_len, int width) const {
    uint64_t m = 0;
    for (const auto& t : rel) {
        bool match = true;
        for (int c = 0; c < prefix_len && match; ++c) match = t[c] == prefix[c];
        if (!match) continue;
        Atom a = t[prefix_len];
        if (atom_index(a) < width) m |= bit(atom_index(a), width);
    }
    return m;
}

TupleSet Space::set_of(uint64_t mask, int top) const {
    TupleSet s(1);
    int width = counts_[top];
    for (int i = 0; i < width; ++i)
        if (mask & bit(i, width)) s.push_sorted(Tuple{make_atom(top, i)});
    return s;
}

void Space::choices(size_t k, const Instance& cur, std::vector<uint64_t>& out) const {
    out.clear();
    const Schema& s = *schema_;
    const Slot& slot = slots_[k];
    uint64_t allowed = 0;
    auto emit = [&](auto&& keep) {
        uint64_t m = 0;
        while (true) {
            if (keep(std::popcount(m))) out.push_back(m);
            if (m == allowed) break;
            m = (m - allowed) & allowed;
        }
    };
    switch (slot.kind) {
        case SlotKind::Sig: {
            const SigInfo& sig = s.sigs[slot.id];
            if (sig.is_abstract && sig.extends_children.empty()) {
                out.push_back(0);
                return;
            }
            allowed = mask_of(cur.sig_sets[sig.parent], slot.top);
            if (sig.kind == SigKind::Extends)
                for (int sib : s.sigs[sig.parent].extends_children) {
                    if (sib == slot.id) break;
                    allowed &= ~mask_of(cur.sig_sets[sib], slot.top);
                }
            emit([&](int n) { return sig_mult_ok(sig.mult, n); });
            return;
        }
        case SlotKind::Binary:
        case SlotKind::Ternary: {
            const FieldInfo& f = s.fields[slot.id];
            const SigInfo& owner = s.sigs[f.owner];
            bool present = cur.sig_sets[f.owner].contains(Tuple{make_atom(owner.top_ordinal, slot.owner)});
            if (present && slot.kind == SlotKind::Ternary)
                present = cur.sig_sets[f.columns[1]].contains(
                    Tuple{make_atom(s.sigs[f.columns[1]].top_ordinal, slot.mid)});
            if (!present) {
                out.push_back(0);
                return;
            }
            allowed = mask_of(cur.sig_sets[f.columns.back()], slot.top);
            if (slot.kind == SlotKind::Ternary) emit([](int) { return true; });
            else emit([&](int n) { return mult_ok(f.mult, n); });
            return;
        }
    }
}

void Space::apply(size_t k, uint64_t mask, Instance& cur) const {
    const Schema& s = *schema_;
    const Slot& slot = slots_[k];
    if (slot.kind == SlotKind::Sig) {
        cur.sig_sets[slot.id] = set_of(mask, slot.top);
        return;
    }
    const FieldInfo& f = s.fields[slot.id];
    TupleSet& rel = cur.field_rels[slot.id];
    Atom owner = make_atom(s.sigs[f.owner].top_ordinal, slot.owner);
    if (slot.kind == SlotKind::Binary) {
        rel.truncate_from(Tuple{owner, 0});
        for (int j = 0; j < slot.width; ++j)
            if (mask & bit(j, slot.width)) rel.push_sorted(Tuple{owner, make_atom(slot.top, j)});
        return;
    }
    Atom mid = make_atom(s.sigs[f.columns[1]].top_ordinal, slot.mid);
    rel.truncate_from(Tuple{owner, mid, 0});
    for (int j = 0; j < slot.width; ++j)
        if (mask & bit(j, slot.width)) rel.push_sorted(Tuple{owner, mid, make_atom(slot.top, j)});
}

bool Space::valid_after(size_t k, const Instance& cur) const {
    int p = slots_[k].abstract_parent;
    if (p < 0) return true;
    const SigInfo& parent = schema_->sigs[p];
    uint64_t covered = 0;
    for (int child : parent.extends_children) covered |= mask_of(cur.sig_sets[child], parent.top_ordinal);
    return covered == mask_of(cur.sig_sets[p], parent.top_ordinal);
}

uint64_t Space::segment(size_t k, const Instance& inst) const {
    const Schema& s = *schema_;
    const Slot& slot = slots_[k];
    if (slot.kind == SlotKind::Sig) return mask_of(inst.sig_sets[slot.id], slot.top);
    const FieldInfo& f = s.fields[slot.id];
    Tuple prefix;
    prefix.arity = slot.kind == SlotKind::Binary ? 1 : 2;
    prefix.atoms[0] = make_atom(s.sigs[f.owner].top_ordinal, slot.owner);
    if (slot.kind == SlotKind::Ternary) prefix.atoms[1] = make_atom(s.sigs[f.columns[1]].top_ordinal, slot.mid);
    return row_mask(inst.field_rels[slot.id], prefix, prefix.arity, slot.width);
}

uint64_t Space::max_choices(const Slot& slot) const {
    uint64_t full = slot.width >= 64 ? std::numeric_limits<uint64_t>::max() : (uint64_t{1} << slot.width);
    if (slot.kind != SlotKind::Binary) return full;
    switch (schema_->fields[slot.id].mult) {
        case FieldMult::Set: return full;
        case FieldMult::Lone: return static_cast<uint64_t>(slot.width) + 1;
        case FieldMult::One: return static_cast<uint64_t>(slot.width);
        case FieldMult::Some: return full - 1;
    }
    return full;
}

long double Space::log2_size() const {
    long double total = 0;
    for (const auto& slot : slots_) {
        uint64_t n = max_choices(slot);
        // a row with no admissible choice only matters when its owner is present
        if (n == 0) continue;
        total += std::log2(static_cast<long double>(n));
    }
    return total;
}

bool first_vector(std::vector<int>& v, const std::vector<std::pair<int, int>>& ranges) {
    v.clear();
    for (const auto& [lo, hi] : ranges) {
        if (lo > hi) return false;
        v.push_back(lo);
    }
    return true;
}

bool next_vector(std::vector<int>& v, const std::vector<std::pair<int, int>>& ranges) {
    for (size_t i = v.size(); i-- > 0;) {
        if (v[i] < ranges[i].second) {
            ++v[i];
            return true;
        }
        v[i] = ranges[i].first;
    }
    return false;
}

namespace {

long double log2_add(long double a, long double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    long double hi = std::max(a, b);
    long double lo = std::min(a, b);
    return hi + std::log2(1.0L + std::exp2(lo - hi));
}

constexpr int kMaxVectorsLog2 = 20;

}  // namespace

void check_budget(std::shared_ptr<const Schema> schema, const std::vector<std::pair<int, int>>& ranges,
                  int budget_log2) {
    std::vector<int> v;
    if (!first_vector(v, ranges)) return;
    long double vectors = 0;
    for (const auto& [lo, hi] : ranges) vectors += std::log2(static_cast<long double>(hi - lo + 1));
    if (vectors > budget_log2 || vectors > kMaxVectorsLog2)
        throw Error(ErrorCode::ScopeTooLarge, "too many atom count combinations");
    long double total = -INFINITY;
    do {
        for (int c : v)
            if (c > 62) throw Error(ErrorCode::ScopeTooLarge, "scope of more than 62 atoms per signature");
        total = log2_add(total, Space(schema, v).log2_size());
    } while (next_vector(v, ranges));
    if (total > budget_log2)
        throw Error(ErrorCode::ScopeTooLarge, "search space of 2^" + std::to_string(static_cast<int>(total)) +
                                                  " candidates exceeds the budget of 2^" +
                                                  std::to_string(budget_log2));
}

std::vector<bool> canonical_bits(const Instance& inst) {
    Space space(inst.schema, inst.universe.counts());
    std::vector<bool> bits;
    for (size_t k = 0; k < space.slots().size(); ++k) {
        const Slot& slot = space.slots()[k];
        uint64_t seg = space.segment(k, inst);
        for (int i = 0; i < slot.width; ++i) bits.push_back(seg >> (slot.width - 1 - i) & 1);
    }
    return bits;
}

}  // namespace livemodel::detail
