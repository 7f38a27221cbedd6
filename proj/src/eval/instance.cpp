#include "livemodel/instance.hpp"

#include <algorithm>

#include "livemodel/diagnostic.hpp"

namespace livemodel {

Tuple::Tuple(std::initializer_list<Atom> xs) {
    arity = static_cast<uint8_t>(xs.size());
    std::copy(xs.begin(), xs.end(), atoms.begin());
}

bool Tuple::operator==(const Tuple& o) const {
    if (arity != o.arity) return false;
    for (int i = 0; i < arity; ++i)
        if (atoms[i] != o.atoms[i]) return false;
    return true;
}

std::strong_ordering Tuple::operator<=>(const Tuple& o) const {
    if (arity != o.arity) return arity <=> o.arity;
    for (int i = 0; i < arity; ++i)
        if (atoms[i] != o.atoms[i]) return atoms[i] <=> o.atoms[i];
    return std::strong_ordering::equal;
}

Tuple join_tuples(const Tuple& a, const Tuple& b) {
    Tuple t;
    t.arity = static_cast<uint8_t>(a.arity + b.arity - 2);
    int k = 0;
    for (int i = 0; i + 1 < a.arity; ++i) t.atoms[k++] = a.atoms[i];
    for (int i = 1; i < b.arity; ++i) t.atoms[k++] = b.atoms[i];
    return t;
}

Tuple concat_tuples(const Tuple& a, const Tuple& b) {
    Tuple t;
    t.arity = static_cast<uint8_t>(a.arity + b.arity);
    int k = 0;
    for (int i = 0; i < a.arity; ++i) t.atoms[k++] = a.atoms[i];
    for (int i = 0; i < b.arity; ++i) t.atoms[k++] = b.atoms[i];
    return t;
}

TupleSet TupleSet::from(int arity, std::vector<Tuple> tuples) {
    TupleSet s(arity);
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    s.items_ = std::move(tuples);
    return s;
}

TupleSet TupleSet::unary(const std::vector<Atom>& atoms) {
    std::vector<Tuple> ts;
    ts.reserve(atoms.size());
    for (Atom a : atoms) ts.push_back(Tuple{a});
    return from(1, std::move(ts));
}

bool TupleSet::contains(const Tuple& t) const { return std::binary_search(items_.begin(), items_.end(), t); }

void TupleSet::insert(const Tuple& t) {
    auto it = std::lower_bound(items_.begin(), items_.end(), t);
    if (it == items_.end() || !(*it == t)) items_.insert(it, t);
}

void TupleSet::truncate_from(const Tuple& t) {
    items_.erase(std::lower_bound(items_.begin(), items_.end(), t), items_.end());
}

std::vector<Atom> TupleSet::atoms() const {
    std::vector<Atom> out;
    out.reserve(items_.size());
    for (const auto& t : items_) out.push_back(t[0]);
    return out;
}

TupleSet set_union(const TupleSet& a, const TupleSet& b) {
    TupleSet r(a.arity_);
    r.items_.reserve(a.size() + b.size());
    std::set_union(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(), std::back_inserter(r.items_));
    return r;
}

TupleSet set_difference(const TupleSet& a, const TupleSet& b) {
    TupleSet r(a.arity_);
    std::set_difference(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                        std::back_inserter(r.items_));
    return r;
}

TupleSet set_intersection(const TupleSet& a, const TupleSet& b) {
    TupleSet r(a.arity_);
    std::set_intersection(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                          std::back_inserter(r.items_));
    return r;
}

size_t symmetric_difference_size(const TupleSet& a, const TupleSet& b) {
    size_t n = 0;
    auto i = a.items_.begin();
    auto j = b.items_.begin();
    while (i != a.items_.end() && j != b.items_.end()) {
        if (*i < *j) {
            ++n;
            ++i;
        } else if (*j < *i) {
            ++n;
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return n + static_cast<size_t>(a.items_.end() - i) + static_cast<size_t>(b.items_.end() - j);
}

bool TupleSet::subset_of(const TupleSet& o) const {
    return std::includes(o.items_.begin(), o.items_.end(), items_.begin(), items_.end());
}

// ---- universe --------------------------------------------------------------

Universe Universe::standard(const Schema& schema, const std::vector<int>& counts) {
    Universe u;
    u.names.resize(schema.tops.size());
    for (size_t t = 0; t < schema.tops.size(); ++t) {
        int n = t < counts.size() ? counts[t] : 0;
        const std::string& base = schema.sigs[schema.tops[t]].name;
        for (int i = 0; i < n; ++i) u.names[t].push_back(base + std::to_string(i));
    }
    return u;
}

std::vector<int> Universe::counts() const {
    std::vector<int> c;
    for (const auto& n : names) c.push_back(static_cast<int>(n.size()));
    return c;
}

std::string Universe::atom_name(Atom a) const {
    int t = atom_top(a);
    int i = atom_index(a);
    if (t < static_cast<int>(names.size()) && i < static_cast<int>(names[t].size())) return names[t][i];
    return "?" + std::to_string(t) + "_" + std::to_string(i);
}

std::optional<Atom> Universe::find(std::string_view name) const {
    for (size_t t = 0; t < names.size(); ++t)
        for (size_t i = 0; i < names[t].size(); ++i)
            if (names[t][i] == name) return make_atom(static_cast<int>(t), static_cast<int>(i));
    return std::nullopt;
}

std::vector<Atom> Universe::atoms(int top_ordinal) const {
    std::vector<Atom> out;
    for (int i = 0; i < count(top_ordinal); ++i) out.push_back(make_atom(top_ordinal, i));
    return out;
}

// ---- instance --------------------------------------------------------------

Instance Instance::empty(std::shared_ptr<const Schema> schema, Universe universe) {
    Instance inst;
    inst.universe = std::move(universe);
    inst.universe.names.resize(schema->tops.size());
    inst.sig_sets.assign(schema->sigs.size(), TupleSet(1));
    for (size_t t = 0; t < schema->tops.size(); ++t)
        inst.sig_sets[schema->tops[t]] = TupleSet::unary(inst.universe.atoms(static_cast<int>(t)));
    for (const auto& f : schema->fields) inst.field_rels.emplace_back(f.arity());
    inst.schema = std::move(schema);
    return inst;
}

const TupleSet& Instance::sig(std::string_view name) const {
    int s = schema->find_sig(name);
    if (s < 0) throw Error(ErrorCode::StructuralMismatch, "unknown signature '" + std::string(name) + "'");
    return sig_sets[s];
}

const TupleSet& Instance::field(std::string_view name) const {
    int f = schema->find_field(name);
    if (f < 0) throw Error(ErrorCode::StructuralMismatch, "unknown field '" + std::string(name) + "'");
    return field_rels[f];
}

std::string Instance::render(const TupleSet& set) const {
    if (set.empty()) return "{}";
    std::string out;
    bool first = true;
    for (const auto& t : set) {
        if (!first) out += " + ";
        first = false;
        for (int i = 0; i < t.arity; ++i) {
            if (i) out += "->";
            out += universe.atom_name(t[i]);
        }
    }
    return out;
}

void validate_shape(const Instance& inst) {
    auto mismatch = [](const std::string& what) { throw Error(ErrorCode::StructuralMismatch, what); };
    if (!inst.schema) mismatch("instance has no schema");
    const Schema& s = *inst.schema;
    if (inst.sig_sets.size() != s.sigs.size()) mismatch("signature table does not match the model");
    if (inst.field_rels.size() != s.fields.size()) mismatch("field table does not match the model");
    if (inst.universe.names.size() != s.tops.size()) mismatch("universe does not match the model's top-level sigs");
    auto in_universe = [&](Atom a) {
        int t = atom_top(a);
        return t < static_cast<int>(s.tops.size()) && atom_index(a) < inst.universe.count(t);
    };
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        const TupleSet& set = inst.sig_sets[i];
        if (set.arity() != 1) mismatch("signature '" + s.sigs[i].name + "' is not a set");
        for (const auto& t : set) {
            if (!in_universe(t[0]) || atom_top(t[0]) != s.sigs[i].top_ordinal)
                mismatch("signature '" + s.sigs[i].name + "' holds an atom outside its universe");
        }
        if (s.sigs[i].kind == SigKind::Top) {
            if (set.tuples() != TupleSet::unary(inst.universe.atoms(s.sigs[i].top_ordinal)).tuples())
                mismatch("top-level signature '" + s.sigs[i].name + "' must hold exactly its universe atoms");
        }
    }
    for (size_t i = 0; i < s.fields.size(); ++i) {
        const TupleSet& rel = inst.field_rels[i];
        const FieldInfo& f = s.fields[i];
        if (rel.arity() != f.arity()) mismatch("field '" + f.name + "' has the wrong arity");
        for (const auto& t : rel) {
            if (t.arity != f.arity()) mismatch("field '" + f.name + "' has a tuple of the wrong arity");
            for (int c = 0; c < t.arity; ++c)
                if (!in_universe(t[c]) || atom_top(t[c]) != s.sigs[f.columns[c]].top_ordinal)
                    mismatch("field '" + f.name + "' holds an atom of the wrong signature");
        }
    }
}

std::vector<std::string> implicit_violations(const Instance& inst) {
    std::vector<std::string> out;
    const Schema& s = *inst.schema;
    for (size_t i = 0; i < s.sigs.size(); ++i) {
        const SigInfo& sig = s.sigs[i];
        const TupleSet& set = inst.sig_sets[i];
        if (sig.parent >= 0 && !set.subset_of(inst.sig_sets[sig.parent]))
            out.push_back(sig.name + " is not a subset of " + s.sigs[sig.parent].name);
        const auto& kids = sig.extends_children;
        for (size_t a = 0; a < kids.size(); ++a)
            for (size_t b = a + 1; b < kids.size(); ++b)
                if (!set_intersection(inst.sig_sets[kids[a]], inst.sig_sets[kids[b]]).empty())
                    out.push_back(s.sigs[kids[a]].name + " and " + s.sigs[kids[b]].name + " overlap");
        if (sig.is_abstract) {
            TupleSet u(1);
            for (int k : kids) u = set_union(u, inst.sig_sets[k]);
            if (!(u == set)) out.push_back("abstract " + sig.name + " has atoms outside its children");
        }
        size_t n = set.size();
        if (sig.mult == SigMult::One && n != 1) out.push_back(sig.name + " must have exactly one atom");
        if (sig.mult == SigMult::Lone && n > 1) out.push_back(sig.name + " must have at most one atom");
        if (sig.mult == SigMult::Some && n < 1) out.push_back(sig.name + " must have at least one atom");
    }
    for (size_t i = 0; i < s.fields.size(); ++i) {
        const FieldInfo& f = s.fields[i];
        const TupleSet& rel = inst.field_rels[i];
        bool typed = true;
        for (const auto& t : rel)
            for (int c = 0; c < t.arity && typed; ++c)
                if (!inst.sig_sets[f.columns[c]].contains(Tuple{t[c]})) typed = false;
        if (!typed) out.push_back(f.name + " has a tuple outside its column signatures");
        if (f.ternary || f.mult == FieldMult::Set) continue;
        for (Atom owner : inst.sig_sets[f.owner].atoms()) {
            size_t image = 0;
            for (const auto& t : rel)
                if (t[0] == owner) ++image;
            bool ok = f.mult == FieldMult::Lone ? image <= 1 : f.mult == FieldMult::One ? image == 1 : image >= 1;
            if (!ok) {
                out.push_back(f.name + " violates its multiplicity for " + inst.universe.atom_name(owner));
                break;
            }
        }
    }
    return out;
}

Instance rebind(const Instance& inst, std::shared_ptr<const Schema> schema) {
    const Schema& from = *inst.schema;
    const Schema& to = *schema;
    auto mismatch = [](const std::string& what) { throw Error(ErrorCode::StructuralMismatch, what); };

    // old top ordinal -> new top ordinal
    std::vector<int> top_map(from.tops.size(), -1);
    for (size_t t = 0; t < from.tops.size(); ++t) {
        int s = to.find_sig(from.sigs[from.tops[t]].name);
        if (s >= 0 && to.sigs[s].kind == SigKind::Top) top_map[t] = to.sigs[s].top_ordinal;
        else if (inst.universe.count(static_cast<int>(t)) > 0)
            mismatch("signature '" + from.sigs[from.tops[t]].name + "' is no longer a top-level signature");
    }
    Universe u;
    u.names.resize(to.tops.size());
    for (size_t t = 0; t < from.tops.size(); ++t)
        if (top_map[t] >= 0) u.names[top_map[t]] = inst.universe.names[t];

    auto remap = [&](Atom a) { return make_atom(top_map[atom_top(a)], atom_index(a)); };

    Instance out = Instance::empty(schema, std::move(u));
    for (size_t i = 0; i < from.sigs.size(); ++i) {
        const TupleSet& set = inst.sig_sets[i];
        int s = to.find_sig(from.sigs[i].name);
        if (s < 0) {
            if (!set.empty()) mismatch("unknown signature '" + from.sigs[i].name + "'");
            continue;
        }
        if (to.sigs[s].kind == SigKind::Top) continue;
        std::vector<Atom> atoms;
        for (Atom a : set.atoms()) {
            if (top_map[atom_top(a)] != to.sigs[s].top_ordinal)
                mismatch("signature '" + from.sigs[i].name + "' moved to another hierarchy");
            atoms.push_back(remap(a));
        }
        out.sig_sets[s] = TupleSet::unary(atoms);
    }
    for (size_t i = 0; i < from.fields.size(); ++i) {
        const TupleSet& rel = inst.field_rels[i];
        int f = to.find_field(from.fields[i].name);
        if (f < 0) {
            if (!rel.empty()) mismatch("unknown field '" + from.fields[i].name + "'");
            continue;
        }
        const FieldInfo& nf = to.fields[f];
        if (nf.arity() != rel.arity() && !rel.empty()) mismatch("field '" + nf.name + "' changed arity");
        std::vector<Tuple> tuples;
        for (const auto& t : rel) {
            Tuple m = t;
            for (int c = 0; c < t.arity; ++c) {
                m.atoms[c] = remap(t[c]);
                if (atom_top(m.atoms[c]) != to.sigs[nf.columns[c]].top_ordinal)
                    mismatch("field '" + nf.name + "' changed column signatures");
            }
            tuples.push_back(m);
        }
        out.field_rels[f] = TupleSet::from(nf.arity(), std::move(tuples));
    }
    validate_shape(out);
    return out;
}

}  // namespace livemodel
