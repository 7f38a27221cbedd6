#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livemodel/schema.hpp"

namespace livemodel {

/// An atom is identified by its top-level sig ordinal and its index within that sig,
/// so atoms from different instances of one model compare directly.
using Atom = uint32_t;

inline constexpr int kMaxArity = 6;

constexpr Atom make_atom(int top_ordinal, int index) {
    return (static_cast<uint32_t>(top_ordinal) << 16) | static_cast<uint32_t>(index);
}
constexpr int atom_top(Atom a) { return static_cast<int>(a >> 16); }
constexpr int atom_index(Atom a) { return static_cast<int>(a & 0xffffu); }

struct Tuple {
    uint8_t arity = 0;
    std::array<Atom, kMaxArity> atoms{};

    Tuple() = default;
    Tuple(std::initializer_list<Atom> xs);

    Atom operator[](size_t i) const { return atoms[i]; }
    Atom front() const { return atoms[0]; }
    Atom back() const { return atoms[arity - 1]; }

    bool operator==(const Tuple& o) const;
    std::strong_ordering operator<=>(const Tuple& o) const;
};

/// Join of the last column of a with the first column of b (caller checks a.back() == b.front()).
Tuple join_tuples(const Tuple& a, const Tuple& b);
Tuple concat_tuples(const Tuple& a, const Tuple& b);

/// Sorted set of same-arity tuples.
class TupleSet {
public:
    TupleSet() = default;
    explicit TupleSet(int arity) : arity_(arity) {}
    static TupleSet from(int arity, std::vector<Tuple> tuples);
    static TupleSet unary(const std::vector<Atom>& atoms);

    int arity() const { return arity_; }
    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    bool contains(const Tuple& t) const;
    void insert(const Tuple& t);
    /// Appends a tuple that sorts after every current element.
    void push_sorted(const Tuple& t) { items_.push_back(t); }
    /// Drops every element not less than t.
    void truncate_from(const Tuple& t);

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::vector<Tuple>& tuples() const { return items_; }
    std::vector<Atom> atoms() const;  // unary sets: members in order

    bool operator==(const TupleSet& o) const { return items_ == o.items_; }

    friend TupleSet set_union(const TupleSet& a, const TupleSet& b);
    friend TupleSet set_difference(const TupleSet& a, const TupleSet& b);
    friend TupleSet set_intersection(const TupleSet& a, const TupleSet& b);
    friend size_t symmetric_difference_size(const TupleSet& a, const TupleSet& b);
    bool subset_of(const TupleSet& o) const;

private:
    int arity_ = 1;
    std::vector<Tuple> items_;
};

/// Atom pool of an instance: per top-level sig (by ordinal) the ordered atom names.
struct Universe {
    std::vector<std::vector<std::string>> names;

    static Universe standard(const Schema& schema, const std::vector<int>& counts);

    int count(int top_ordinal) const { return static_cast<int>(names[top_ordinal].size()); }
    std::vector<int> counts() const;
    std::string atom_name(Atom a) const;
    std::optional<Atom> find(std::string_view name) const;
    std::vector<Atom> atoms(int top_ordinal) const;
};

struct Instance {
    std::shared_ptr<const Schema> schema;
    Universe universe;
    std::vector<TupleSet> sig_sets;    // by sig id, unary
    std::vector<TupleSet> field_rels;  // by field id

    /// Empty instance over a universe: top sigs hold every universe atom, everything else is empty.
    static Instance empty(std::shared_ptr<const Schema> schema, Universe universe);

    const TupleSet& sig(std::string_view name) const;
    const TupleSet& field(std::string_view name) const;

    std::string render(const TupleSet& set) const;

    /// Same atoms and tuples (names are not compared).
    bool operator==(const Instance& o) const { return sig_sets == o.sig_sets && field_rels == o.field_rels; }
};

/// Throws Error(StructuralMismatch) when the instance does not fit its schema's shape:
/// wrong table sizes, atoms outside the universe, arity mismatches, or top-level sets
/// that differ from the universe.
void validate_shape(const Instance& inst);

/// Violated implicit constraints (hierarchy, typing, multiplicities); empty when all hold.
std::vector<std::string> implicit_violations(const Instance& inst);

/// Re-expresses an instance over another schema by sig and field names.
/// Sigs missing from the instance become empty; unknown names or incompatible
/// columns raise StructuralMismatch.
Instance rebind(const Instance& inst, std::shared_ptr<const Schema> schema);

}  // namespace livemodel
