#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "livemodel/instance.hpp"

namespace livemodel::detail {

enum class SlotKind { Sig, Binary, Ternary };

/// One contiguous segment of the canonical bitstring. A segment is a bitmask over the
/// atoms of one top-level sig, most significant bit first (bit width-1-i is atom i).
struct Slot {
    SlotKind kind = SlotKind::Sig;
    int id = -1;     // sig id or field id
    int owner = -1;  // atom index of the row owner (fields)
    int mid = -1;    // atom index of the middle column (ternary fields)
    int width = 0;
    int top = -1;              // top ordinal of the segment's atoms
    int abstract_parent = -1;  // sig to check for full coverage once this slot is set
};

/// The slot layout of the candidate space for one vector of top-level counts.
class Space {
public:
    Space(std::shared_ptr<const Schema> schema, std::vector<int> counts);

    const std::vector<Slot>& slots() const { return slots_; }
    const std::vector<int>& counts() const { return counts_; }

    /// Top-level sigs hold their atoms; everything else is empty.
    Instance blank() const;

    /// Admissible segments for slot k given the earlier slots of cur, ascending.
    void choices(size_t k, const Instance& cur, std::vector<uint64_t>& out) const;
    /// Writes slot k's segment into cur, replacing it and any later rows of the same field.
    void apply(size_t k, uint64_t mask, Instance& cur) const;
    /// Constraints that become decidable once slot k is set.
    bool valid_after(size_t k, const Instance& cur) const;

    /// Slot k's segment read from an instance, restricted to this space's atoms.
    uint64_t segment(size_t k, const Instance& inst) const;

    /// log2 of the largest number of assignments the slots admit.
    long double log2_size() const;

    Atom atom(int top, int index) const { return make_atom(top, index); }
    uint64_t mask_of(const TupleSet& unary, int top) const;

private:
    uint64_t bit(int index, int width) const { return uint64_t{1} << (width - 1 - index); }
    uint64_t row_mask(const TupleSet& rel, const Tuple& prefix, int prefix_len, int width) const;
    TupleSet set_of(uint64_t mask, int top) const;
    uint64_t max_choices(const Slot& s) const;

    std::shared_ptr<const Schema> schema_;
    std::vector<int> counts_;
    std::vector<Slot> slots_;
};

/// Count vectors in lexicographic order over inclusive per-top ranges.
bool first_vector(std::vector<int>& v, const std::vector<std::pair<int, int>>& ranges);
bool next_vector(std::vector<int>& v, const std::vector<std::pair<int, int>>& ranges);

/// Throws ScopeTooLarge when the summed space over every count vector exceeds 2^budget_log2.
void check_budget(std::shared_ptr<const Schema> schema, const std::vector<std::pair<int, int>>& ranges,
                  int budget_log2);

/// Canonical bitstring of inst under its own counts.
std::vector<bool> canonical_bits(const Instance& inst);

}  // namespace livemodel::detail
