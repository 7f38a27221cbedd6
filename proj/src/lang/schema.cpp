#include "livemodel/schema.hpp"

#include <algorithm>

namespace livemodel {

Schema Schema::build(const Model& model) {
    Schema s;
    for (const auto& decl : model.sigs) {
        SigInfo info;
        info.name = decl.name;
        info.kind = decl.kind;
        info.is_abstract = decl.is_abstract;
        info.mult = decl.mult;
        s.sigs.push_back(std::move(info));
    }
    for (size_t i = 0; i < model.sigs.size(); ++i) {
        const auto& decl = model.sigs[i];
        if (decl.kind == SigKind::Top) continue;
        int parent = s.find_sig(decl.parent);
        s.sigs[i].parent = parent;
        if (parent < 0) continue;
        if (decl.kind == SigKind::Extends) s.sigs[parent].extends_children.push_back(static_cast<int>(i));
        else s.sigs[parent].in_children.push_back(static_cast<int>(i));
    }
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        if (s.sigs[i].kind == SigKind::Top) {
            s.sigs[i].top_ordinal = static_cast<int>(s.tops.size());
            s.tops.push_back(static_cast<int>(i));
        }
    }
    std::vector<int> depth(s.sigs.size(), 0);
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        int cur = static_cast<int>(i);
        int d = 0;
        // Bounded walk: resolution rejects cycles before a schema is built.
        while (s.sigs[cur].parent >= 0 && d <= static_cast<int>(s.sigs.size())) {
            cur = s.sigs[cur].parent;
            ++d;
        }
        s.sigs[i].top = cur;
        s.sigs[i].top_ordinal = s.sigs[cur].top_ordinal;
        depth[i] = d;
    }
    for (size_t i = 0; i < s.sigs.size(); ++i)
        if (s.sigs[i].kind != SigKind::Top) s.subsig_order_.push_back(static_cast<int>(i));
    std::stable_sort(s.subsig_order_.begin(), s.subsig_order_.end(),
                     [&](int a, int b) { return depth[a] < depth[b]; });

    for (const auto& decl : model.sigs) {
        for (const auto& f : decl.fields) {
            FieldInfo info;
            info.name = f.name;
            info.owner = s.find_sig(decl.name);
            info.columns.push_back(info.owner);
            if (f.ternary) info.columns.push_back(s.find_sig(f.mid));
            info.columns.push_back(s.find_sig(f.target));
            info.mult = f.mult;
            info.ternary = f.ternary;
            s.fields.push_back(std::move(info));
        }
    }
    return s;
}

int Schema::find_sig(std::string_view name) const {
    for (size_t i = 0; i < sigs.size(); ++i)
        if (sigs[i].name == name) return static_cast<int>(i);
    return -1;
}

int Schema::find_field(std::string_view name) const {
    for (size_t i = 0; i < fields.size(); ++i)
        if (fields[i].name == name) return static_cast<int>(i);
    return -1;
}

bool Schema::is_ancestor_or_self(int ancestor, int sig) const {
    for (int cur = sig, steps = 0; cur >= 0 && steps <= static_cast<int>(sigs.size()); cur = sigs[cur].parent, ++steps)
        if (cur == ancestor) return true;
    return false;
}

int Schema::anchor(int sig) const {
    int cur = sig;
    while (sigs[cur].kind == SigKind::In && sigs[cur].parent >= 0) cur = sigs[cur].parent;
    return cur;
}

bool Schema::may_overlap(int a, int b) const {
    if (a < 0 || b < 0) return false;
    if (sigs[a].top != sigs[b].top) return false;
    if (is_ancestor_or_self(a, b) || is_ancestor_or_self(b, a)) return true;
    // Subset sigs only live inside their nearest extends/top ancestor; two sigs
    // may share atoms unless those anchors are disjoint extends siblings.
    int x = anchor(a);
    int y = anchor(b);
    return is_ancestor_or_self(x, y) || is_ancestor_or_self(y, x);
}

int Schema::meet(int a, int b) const {
    if (is_ancestor_or_self(a, b)) return b;
    return a;
}

bool Schema::operator==(const Schema& other) const {
    if (sigs.size() != other.sigs.size() || fields.size() != other.fields.size()) return false;
    for (size_t i = 0; i < sigs.size(); ++i) {
        const auto& x = sigs[i];
        const auto& y = other.sigs[i];
        if (x.name != y.name || x.kind != y.kind || x.parent != y.parent || x.is_abstract != y.is_abstract ||
            x.mult != y.mult)
            return false;
    }
    for (size_t i = 0; i < fields.size(); ++i) {
        const auto& x = fields[i];
        const auto& y = other.fields[i];
        if (x.name != y.name || x.columns != y.columns || x.mult != y.mult) return false;
    }
    return true;
}

}  // namespace livemodel
